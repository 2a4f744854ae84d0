//! Differential games and their simultaneous gradient field.
//!
//! A game is a set of players, each owning an ordered block of strategy
//! variables and a utility expression over the joint strategy. The flat
//! coordinate order is the concatenation of the player blocks; coordinate
//! `k` of the simultaneous gradient is the derivative of the owning
//! player's utility with respect to variable `k`. The Jacobian of that
//! field, its symmetric/antisymmetric split and its trace (the divergence)
//! are all derived symbolically once and evaluated exactly.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{parse, Env, EvalError, Expr, ParseError};
use crate::sampler::Sampler;

/// Guard for normalized residuals, so the zero matrix yields 0 rather
/// than 0/0.
pub const RESIDUAL_EPS: f64 = 1e-30;

/// Verdict tolerance for `is_nonstrategic`.
pub const NONSTRATEGIC_TOL: f64 = 1e-10;

/// Verdict tolerance for `verify_potential`.
pub const POTENTIAL_TOL: f64 = 1e-8;

/// Closedness gate for potential reconstruction.
pub const CLOSED_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct Player {
    pub name: String,
    pub vars: Vec<String>,
    pub utility: Expr,
}

/// A differential game with cached symbolic gradient field, Jacobian and
/// divergence. Immutable after construction.
#[derive(Debug, Clone)]
pub struct DifferentialGame {
    name: String,
    players: Vec<Player>,
    flat_vars: Vec<String>,
    var_owner: Vec<usize>,
    du: Vec<Expr>,
    jac: Vec<Vec<Expr>>,
    div: Expr,
}

#[derive(Debug, Error)]
pub enum GameError {
    #[error("game document does not match the schema: {0}")]
    Schema(#[from] serde_json::Error),
    #[error("failed to parse utility of player `{player}`: {source}")]
    Utility {
        player: String,
        #[source]
        source: ParseError,
    },
    #[error("variable `{name}` is declared by more than one player")]
    DuplicateVariable { name: String },
    #[error("a game needs at least one player")]
    NoPlayers,
    #[error("player `{player}` declares no variables")]
    NoVars { player: String },
    #[error("utility of player `{player}` references undeclared variable `{name}`")]
    UndeclaredVariable { player: String, name: String },
    #[error("games have different player/variable structure")]
    StructureMismatch,
    #[error("potential weights must be positive")]
    InvalidAlpha,
    #[error("point has dimension {got}, game has dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(
        "gradient field is not closed (max normalized antisymmetric residual {max_sym_res:.3e})"
    )]
    NotClosed { max_sym_res: f64 },
    #[error("line-integral quadrature did not converge")]
    QuadratureFailed,
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// JSON document for a game: `{"name": ..., "players": [{"name", "vars",
/// "utility"}, ...]}` with utilities as expression strings.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GameDoc {
    #[serde(default)]
    name: Option<String>,
    players: Vec<PlayerDoc>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlayerDoc {
    name: String,
    vars: Vec<String>,
    utility: String,
}

impl DifferentialGame {
    pub fn new(name: impl Into<String>, players: Vec<Player>) -> Result<Self, GameError> {
        if players.is_empty() {
            return Err(GameError::NoPlayers);
        }
        let mut flat_vars: Vec<String> = Vec::new();
        let mut var_owner = Vec::new();
        for (idx, player) in players.iter().enumerate() {
            if player.vars.is_empty() {
                return Err(GameError::NoVars {
                    player: player.name.clone(),
                });
            }
            for v in &player.vars {
                if flat_vars.iter().any(|w| w == v) {
                    return Err(GameError::DuplicateVariable { name: v.clone() });
                }
                flat_vars.push(v.clone());
                var_owner.push(idx);
            }
        }
        for player in &players {
            for used in player.utility.variables() {
                if !flat_vars.iter().any(|w| w == used) {
                    return Err(GameError::UndeclaredVariable {
                        player: player.name.clone(),
                        name: used.to_string(),
                    });
                }
            }
        }

        let du: Vec<Expr> = flat_vars
            .iter()
            .zip(&var_owner)
            .map(|(v, &m)| players[m].utility.differentiate(v))
            .collect();
        let jac: Vec<Vec<Expr>> = du
            .iter()
            .map(|g| flat_vars.iter().map(|v| g.differentiate(v)).collect())
            .collect();
        let div = jac
            .iter()
            .enumerate()
            .fold(Expr::Const(0.0), |acc, (i, row)| {
                Expr::Add(Box::new(acc), Box::new(row[i].clone()))
            })
            .simplify();

        Ok(DifferentialGame {
            name: name.into(),
            players,
            flat_vars,
            var_owner,
            du,
            jac,
            div,
        })
    }

    /// Load a game from its JSON document. Utilities are parsed against
    /// the union of all players' variables.
    pub fn from_json(text: &str) -> Result<Self, GameError> {
        let doc: GameDoc = serde_json::from_str(text)?;
        let all_vars: Vec<String> = doc
            .players
            .iter()
            .flat_map(|p| p.vars.iter().cloned())
            .collect();
        let players = doc
            .players
            .into_iter()
            .map(|p| {
                let utility = parse(&p.utility, &all_vars).map_err(|source| GameError::Utility {
                    player: p.name.clone(),
                    source,
                })?;
                Ok(Player {
                    name: p.name,
                    vars: p.vars,
                    utility,
                })
            })
            .collect::<Result<Vec<_>, GameError>>()?;
        DifferentialGame::new(doc.name.unwrap_or_default(), players)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn players(&self) -> &[Player] {
        &self.players
    }

    /// Total strategy dimension.
    pub fn dim(&self) -> usize {
        self.flat_vars.len()
    }

    /// Variable names in flat coordinate order.
    pub fn flat_vars(&self) -> &[String] {
        &self.flat_vars
    }

    /// Player index owning each flat coordinate.
    pub fn var_owner(&self) -> &[usize] {
        &self.var_owner
    }

    /// The coordinate range owned by player `m`.
    pub fn block(&self, m: usize) -> std::ops::Range<usize> {
        let start = self.var_owner.iter().position(|&o| o == m).unwrap();
        let len = self.var_owner.iter().filter(|&&o| o == m).count();
        start..start + len
    }

    /// The simultaneous gradient: coordinate `k` is the owning player's
    /// utility differentiated by variable `k`, simplified.
    pub fn simultaneous_gradient(&self) -> &[Expr] {
        &self.du
    }

    /// Symbolic Jacobian of the simultaneous gradient:
    /// `jac[i][j] = d(Du_i)/dx_j`.
    pub fn jacobian_exprs(&self) -> &[Vec<Expr>] {
        &self.jac
    }

    /// Symbolic divergence of the gradient field (the Jacobian trace).
    pub fn divergence_expr(&self) -> &Expr {
        &self.div
    }

    pub fn env<'a>(&'a self, point: &'a [f64]) -> Env<'a> {
        Env::new(&self.flat_vars, point)
    }

    fn check_dim(&self, point: &[f64]) -> Result<(), GameError> {
        if point.len() != self.dim() {
            return Err(GameError::DimensionMismatch {
                expected: self.dim(),
                got: point.len(),
            });
        }
        Ok(())
    }

    /// Evaluate the simultaneous gradient at a point.
    pub fn gradient_at(&self, point: &[f64]) -> Result<Vec<f64>, GameError> {
        self.check_dim(point)?;
        let env = self.env(point);
        self.du
            .iter()
            .map(|e| e.eval(&env).map_err(GameError::from))
            .collect()
    }

    /// Evaluate the Jacobian at a point and split it into symmetric and
    /// antisymmetric parts with normalized residuals.
    pub fn jacobian(&self, point: &[f64]) -> Result<JacobianSplit, GameError> {
        self.check_dim(point)?;
        let n = self.dim();
        let env = self.env(point);
        let mut j = DMatrix::zeros(n, n);
        for (i, row) in self.jac.iter().enumerate() {
            for (jj, e) in row.iter().enumerate() {
                j[(i, jj)] = e.eval(&env)?;
            }
        }
        Ok(JacobianSplit::from_matrix(j))
    }

    /// Divergence of the gradient field at a point (exact Jacobian trace).
    pub fn divergence(&self, point: &[f64]) -> Result<f64, GameError> {
        self.check_dim(point)?;
        Ok(self.div.eval(&self.env(point))?)
    }

    /// Max-norm sweep of the gradient field; verdict is true when the
    /// field vanishes at every sample within [`NONSTRATEGIC_TOL`].
    pub fn is_nonstrategic(&self, sampler: &Sampler) -> Result<NonStrategicReport, GameError> {
        let mut max = 0.0f64;
        for p in sampler.points() {
            let g = self.gradient_at(&p)?;
            for v in g {
                max = max.max(v.abs());
            }
        }
        Ok(NonStrategicReport {
            max_gradient: max,
            tolerance: NONSTRATEGIC_TOL,
            verdict: max <= NONSTRATEGIC_TOL,
            seed: sampler.seed,
        })
    }

    /// Two games are strategically equivalent when their difference game
    /// is non-strategic, i.e. per-player utility differences do not depend
    /// on the player's own block.
    pub fn strategically_equivalent(
        &self,
        other: &DifferentialGame,
        sampler: &Sampler,
    ) -> Result<EquivalenceReport, GameError> {
        if !self.same_structure(other) {
            return Err(GameError::StructureMismatch);
        }
        let players = self
            .players
            .iter()
            .zip(&other.players)
            .map(|(a, b)| Player {
                name: a.name.clone(),
                vars: a.vars.clone(),
                utility: Expr::Sub(Box::new(a.utility.clone()), Box::new(b.utility.clone()))
                    .simplify(),
            })
            .collect();
        let difference = DifferentialGame::new("difference", players)?;
        let report = difference.is_nonstrategic(sampler)?;
        Ok(EquivalenceReport {
            max_deviation: report.max_gradient,
            verdict: report.verdict,
            seed: sampler.seed,
        })
    }

    pub fn same_structure(&self, other: &DifferentialGame) -> bool {
        self.players.len() == other.players.len()
            && self
                .players
                .iter()
                .zip(&other.players)
                .all(|(a, b)| a.vars == b.vars)
    }

    /// Check a Monderer-Shapley potential: over sampled deviations of one
    /// player's block, `phi` differences must match `alpha_i` times the
    /// player's utility differences.
    pub fn verify_potential(
        &self,
        phi: &Expr,
        alpha: &[f64],
        sampler: &Sampler,
    ) -> Result<PotentialCheck, GameError> {
        if alpha.len() != self.players.len() || alpha.iter().any(|&a| a <= 0.0) {
            return Err(GameError::InvalidAlpha);
        }
        let mut max_residual = 0.0f64;
        let mut points = sampler.points();
        for k in 0..sampler.count {
            let (Some(base), Some(alt)) = (points.next(), points.next()) else {
                break;
            };
            let i = k % self.players.len();
            let block = self.block(i);
            let mut deviated = base.clone();
            deviated[block.clone()].copy_from_slice(&alt[block]);

            let u = &self.players[i].utility;
            let phi_diff = phi.eval(&self.env(&base))? - phi.eval(&self.env(&deviated))?;
            let u_diff = u.eval(&self.env(&base))? - u.eval(&self.env(&deviated))?;
            max_residual = max_residual.max((phi_diff - alpha[i] * u_diff).abs());
        }
        Ok(PotentialCheck {
            max_residual,
            tolerance: POTENTIAL_TOL,
            verdict: max_residual <= POTENTIAL_TOL,
            seed: sampler.seed,
        })
    }

    /// Reconstruct an exact potential for a closed gradient field as the
    /// line integral of `Du` along rays from the origin. Fails if the
    /// Jacobian has an antisymmetric part above [`CLOSED_TOL`] anywhere on
    /// the sample set.
    pub fn reconstruct_exact_potential(
        &self,
        sampler: &Sampler,
    ) -> Result<(ReconstructedPotential, ReconstructionReport), GameError> {
        let mut max_sym_res = 0.0f64;
        for p in sampler.points() {
            max_sym_res = max_sym_res.max(self.jacobian(&p)?.sym_res);
        }
        if max_sym_res > CLOSED_TOL {
            return Err(GameError::NotClosed { max_sym_res });
        }

        let potential = ReconstructedPotential {
            du: self.du.clone(),
            names: self.flat_vars.clone(),
            quad_tol: 1e-10,
        };

        // Gradient check by five-point central differences; the stencil is
        // exact through quartic terms, so the quadrature tolerance is the
        // noise floor.
        let h = 1e-2;
        let mut max_gradient_residual = 0.0f64;
        let env_names = &self.flat_vars;
        for p in sampler.points() {
            let du_val: Vec<f64> = self
                .du
                .iter()
                .map(|e| e.eval(&Env::new(env_names, &p)))
                .collect::<Result<_, _>>()?;
            for k in 0..self.dim() {
                let mut probe = |offset: f64| -> Result<f64, GameError> {
                    let mut q = p.clone();
                    q[k] += offset;
                    potential.value(&q)
                };
                let grad_k = (-probe(2.0 * h)? + 8.0 * probe(h)? - 8.0 * probe(-h)?
                    + probe(-2.0 * h)?)
                    / (12.0 * h);
                max_gradient_residual = max_gradient_residual.max((grad_k - du_val[k]).abs());
            }
        }
        let report = ReconstructionReport {
            max_gradient_residual,
            samples: sampler.count,
            seed: sampler.seed,
        };
        Ok((potential, report))
    }
}

/// Potential recovered by radial line integration,
/// `phi(w) = integral_0^1 Du(t w) . w dt`, exact for closed analytic
/// fields by the gradient theorem. `phi(0) = 0` fixes the gauge.
#[derive(Debug, Clone)]
pub struct ReconstructedPotential {
    du: Vec<Expr>,
    names: Vec<String>,
    quad_tol: f64,
}

impl ReconstructedPotential {
    pub fn value(&self, point: &[f64]) -> Result<f64, GameError> {
        let mut scaled = vec![0.0; point.len()];
        let mut integrand = |t: f64| -> Result<f64, GameError> {
            for (s, &x) in scaled.iter_mut().zip(point) {
                *s = t * x;
            }
            let env = Env::new(&self.names, &scaled);
            let mut acc = 0.0;
            for (e, &x) in self.du.iter().zip(point) {
                acc += e.eval(&env)? * x;
            }
            Ok(acc)
        };
        adaptive_simpson(&mut integrand, 0.0, 1.0, self.quad_tol)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NonStrategicReport {
    pub max_gradient: f64,
    pub tolerance: f64,
    pub verdict: bool,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    pub max_deviation: f64,
    pub verdict: bool,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PotentialCheck {
    pub max_residual: f64,
    pub tolerance: f64,
    pub verdict: bool,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReconstructionReport {
    pub max_gradient_residual: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Jacobian of the gradient field at a point with its symmetric and
/// antisymmetric parts. `sym_res` is the normalized size of the
/// antisymmetric part (0 for a symmetric Jacobian) and `skew_res` of the
/// symmetric part (0 for a skew Jacobian).
#[derive(Debug, Clone)]
pub struct JacobianSplit {
    pub j: DMatrix<f64>,
    pub sym: DMatrix<f64>,
    pub skew: DMatrix<f64>,
    pub sym_res: f64,
    pub skew_res: f64,
}

impl JacobianSplit {
    pub fn from_matrix(j: DMatrix<f64>) -> Self {
        let sym = (&j + j.transpose()) * 0.5;
        let skew = (&j - j.transpose()) * 0.5;
        let scale = j.norm().max(RESIDUAL_EPS);
        let sym_res = skew.norm() / scale;
        let skew_res = sym.norm() / scale;
        JacobianSplit {
            j,
            sym,
            skew,
            sym_res,
            skew_res,
        }
    }
}

/// Adaptive Simpson quadrature with absolute tolerance.
fn adaptive_simpson(
    f: &mut impl FnMut(f64) -> Result<f64, GameError>,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<f64, GameError> {
    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &mut impl FnMut(f64) -> Result<f64, GameError>,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64, GameError> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm)?;
        let frm = f(rm)?;
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * tol {
            return Ok(left + right + delta / 15.0);
        }
        if depth == 0 {
            return Err(GameError::QuadratureFailed);
        }
        let l = recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)?;
        let r = recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?;
        Ok(l + r)
    }
    let fa = f(a)?;
    let m = 0.5 * (a + b);
    let fm = f(m)?;
    let fb = f(b)?;
    let whole = simpson(fa, fm, fb, b - a);
    recurse(f, a, b, fa, fm, fb, whole, tol, 48)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::SampleBox;

    pub(crate) fn orbit_game() -> DifferentialGame {
        DifferentialGame::from_json(
            r#"{"name":"orbit-example","players":[
                {"name":"p1","vars":["x"],"utility":"x*y"},
                {"name":"p2","vars":["y"],"utility":"-x*y - x^3*y"}]}"#,
        )
        .unwrap()
    }

    fn two_player(u1: &str, u2: &str) -> DifferentialGame {
        DifferentialGame::from_json(&format!(
            r#"{{"players":[
                {{"name":"p1","vars":["x"],"utility":"{u1}"}},
                {{"name":"p2","vars":["y"],"utility":"{u2}"}}]}}"#
        ))
        .unwrap()
    }

    fn fig_potential_game() -> DifferentialGame {
        DifferentialGame::from_json(
            r#"{"name":"fig-potential","players":[
                {"name":"p1","vars":["x1","x2"],
                 "utility":"-(x1^2 + x2^2)/2 + x1*y1 + x2*y2 - (x1^2 + x2^2)^2"},
                {"name":"p2","vars":["y1","y2"],
                 "utility":"-(y1^2 + y2^2)/2 + x1*y1 + x2*y2 - (y1^2 + y2^2)^2"}]}"#,
        )
        .unwrap()
    }

    fn interp_vp_game() -> DifferentialGame {
        DifferentialGame::from_json(
            r#"{"name":"interp-vp","players":[
                {"name":"p1","vars":["x1","x2"],"utility":"x1*y2 - x2*y1"},
                {"name":"p2","vars":["y1","y2"],
                 "utility":"-(x1*y2 - x2*y1) - 0.1*(x1^2*y2^2 + x2^2*y1^2)"}]}"#,
        )
        .unwrap()
    }

    #[test]
    fn load_orbit_document() {
        let g = orbit_game();
        assert_eq!(g.players().len(), 2);
        assert_eq!(g.dim(), 2);
        assert_eq!(g.flat_vars(), ["x".to_string(), "y".to_string()]);
    }

    #[test]
    fn load_rejects_duplicate_variable() {
        let err = DifferentialGame::from_json(
            r#"{"players":[
                {"name":"p1","vars":["x"],"utility":"x"},
                {"name":"p2","vars":["x"],"utility":"x"}]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, GameError::DuplicateVariable { ref name } if name == "x"));
    }

    #[test]
    fn load_single_player_two_vars() {
        let g = DifferentialGame::from_json(
            r#"{"players":[{"name":"p","vars":["x1","x2"],"utility":"x1^2+x2^2"}]}"#,
        )
        .unwrap();
        assert_eq!(g.players().len(), 1);
        assert_eq!(g.dim(), 2);
    }

    #[test]
    fn orbit_simultaneous_gradient() {
        let g = orbit_game();
        let du = g.simultaneous_gradient();
        assert_eq!(du[0], parse("y", &["x", "y"]).unwrap());
        assert_eq!(du[1], parse("-x - x^3", &["x", "y"]).unwrap());
    }

    #[test]
    fn vp_example_gradient() {
        let g = two_player("x^2", "-y^2");
        assert_eq!(g.gradient_at(&[3.0, 5.0]).unwrap(), vec![6.0, -10.0]);
    }

    #[test]
    fn nonstrategic_component_yields_zero_coordinate() {
        let g = two_player("y", "y^2");
        assert_eq!(g.gradient_at(&[1.0, 3.0]).unwrap(), vec![0.0, 6.0]);
    }

    #[test]
    fn jacobian_fully_symmetric_example() {
        let g = two_player("x^2", "-y^2");
        let split = g.jacobian(&[0.7, -1.3]).unwrap();
        assert_eq!(split.j[(0, 0)], 2.0);
        assert_eq!(split.j[(1, 1)], -2.0);
        assert_eq!(split.j[(0, 1)], 0.0);
        assert!(split.sym_res < 1e-12);
        assert!((split.skew_res - 1.0).abs() < 1e-12);
    }

    #[test]
    fn jacobian_fully_skew_example() {
        let g = two_player("x*y", "-x*y");
        let split = g.jacobian(&[2.0, 5.0]).unwrap();
        assert_eq!(split.j[(0, 1)], 1.0);
        assert_eq!(split.j[(1, 0)], -1.0);
        assert!((split.sym_res - 1.0).abs() < 1e-12);
        assert!(split.skew_res < 1e-12);
    }

    #[test]
    fn fig_potential_jacobian_symmetric_at_origin() {
        let g = fig_potential_game();
        let split = g.jacobian(&[0.0; 4]).unwrap();
        assert!(split.sym_res <= 1e-12, "sym_res = {}", split.sym_res);
        // cross-check against finite differences of the gradient field
        let p = [0.0; 4];
        let h = 1e-5;
        for i in 0..4 {
            for j in 0..4 {
                let mut hi = p;
                let mut lo = p;
                hi[j] += h;
                lo[j] -= h;
                let fd =
                    (g.gradient_at(&hi).unwrap()[i] - g.gradient_at(&lo).unwrap()[i]) / (2.0 * h);
                assert!(
                    (split.j[(i, j)] - fd).abs() <= 1e-6 * (1.0 + fd.abs()),
                    "J[{i}][{j}]: symbolic {} vs fd {fd}",
                    split.j[(i, j)]
                );
            }
        }
    }

    #[test]
    fn orbit_divergence_is_identically_zero() {
        let g = orbit_game();
        assert_eq!(*g.divergence_expr(), Expr::Const(0.0));
        assert_eq!(g.divergence(&[1.3, -0.4]).unwrap(), 0.0);
    }

    #[test]
    fn vp_example_divergence_cancels() {
        let g = two_player("x^2", "-y^2");
        assert_eq!(g.divergence(&[10.0, 3.0]).unwrap(), 0.0);
    }

    #[test]
    fn interp_vp_divergence_value() {
        let g = interp_vp_game();
        let d = g.divergence(&[1.0, 1.0, 1.0, 1.0]).unwrap();
        assert!((d - (-0.4)).abs() < 1e-12, "divergence = {d}");
    }

    #[test]
    fn divergence_equals_jacobian_trace() {
        let g = interp_vp_game();
        for p in Sampler::default_for(4, 3).points().take(16) {
            let tr = g.jacobian(&p).unwrap().j.trace();
            assert_eq!(g.divergence(&p).unwrap(), tr);
        }
    }

    #[test]
    fn is_nonstrategic_examples() {
        let sampler = Sampler::default_for(2, 0);
        let opponent_only = two_player("y^3", "x");
        assert!(opponent_only.is_nonstrategic(&sampler).unwrap().verdict);

        let zero = two_player("0", "0");
        assert!(zero.is_nonstrategic(&sampler).unwrap().verdict);

        let orbit = orbit_game();
        let report = orbit.is_nonstrategic(&sampler).unwrap();
        assert!(!report.verdict);
        assert!(report.max_gradient > 0.0);
    }

    #[test]
    fn strategic_equivalence_examples() {
        let sampler = Sampler::default_for(2, 0);
        let g1 = orbit_game();
        // add opponent-only terms: y^2 to u1, x to u2
        let g2 = two_player("x*y + y^2", "-x*y - x^3*y + x");
        let report = g1.strategically_equivalent(&g2, &sampler).unwrap();
        assert!(report.verdict, "deviation {}", report.max_deviation);

        let doubled = two_player("2*(x*y)", "-x*y - x^3*y");
        assert!(!g1.strategically_equivalent(&doubled, &sampler).unwrap().verdict);

        let this = g1.strategically_equivalent(&g1, &sampler).unwrap();
        assert!(this.verdict);
        assert_eq!(this.max_deviation, 0.0);
    }

    #[test]
    fn strategic_equivalence_rejects_structure_mismatch() {
        let g1 = orbit_game();
        let g3 = DifferentialGame::from_json(
            r#"{"players":[{"name":"p","vars":["x","y"],"utility":"x*y"}]}"#,
        )
        .unwrap();
        assert!(matches!(
            g1.strategically_equivalent(&g3, &Sampler::default_for(2, 0)),
            Err(GameError::StructureMismatch)
        ));
    }

    #[test]
    fn verify_potential_common_interest() {
        let g = two_player("x*y", "x*y");
        let phi = parse("x*y", &["x", "y"]).unwrap();
        let check = g
            .verify_potential(&phi, &[1.0, 1.0], &Sampler::default_for(2, 0))
            .unwrap();
        assert!(check.max_residual <= 1e-12, "{}", check.max_residual);
        assert!(check.verdict);
    }

    #[test]
    fn verify_potential_weighted() {
        let g = two_player("2*x^2 + 2*y^2", "x^2 + y^2");
        let phi = parse("x^2 + y^2", &["x", "y"]).unwrap();
        let check = g
            .verify_potential(&phi, &[0.5, 1.0], &Sampler::default_for(2, 0))
            .unwrap();
        assert!(check.max_residual <= 1e-12, "{}", check.max_residual);
    }

    #[test]
    fn verify_potential_rejects_orbit_with_zero_potential() {
        let g = orbit_game();
        let phi = parse("0", &["x", "y"]).unwrap();
        let sampler = Sampler::new(SampleBox::symmetric(2, 1.0), 256, 0);
        let check = g.verify_potential(&phi, &[1.0, 1.0], &sampler).unwrap();
        assert!(check.max_residual > 0.1, "{}", check.max_residual);
        assert!(!check.verdict);
    }

    #[test]
    fn reconstruct_common_interest_potential() {
        let g = two_player("x*y", "x*y");
        let sampler = Sampler::default_for(2, 0);
        let (phi, report) = g.reconstruct_exact_potential(&sampler).unwrap();
        // integral_0^1 2t*(x*y) dt = x*y
        assert!((phi.value(&[2.0, 3.0]).unwrap() - 6.0).abs() < 1e-9);
        assert!(report.max_gradient_residual <= 1e-8, "{report:?}");
    }

    #[test]
    fn reconstruct_fig_potential_gradient_residual() {
        let g = fig_potential_game();
        let sampler = Sampler::new(SampleBox::symmetric(4, 1.0), 24, 0);
        let (phi, report) = g.reconstruct_exact_potential(&sampler).unwrap();
        assert!(
            report.max_gradient_residual <= 1e-6,
            "residual {}",
            report.max_gradient_residual
        );
        // a reconstructed potential passes the Monderer-Shapley check with
        // unit weights, up to quadrature noise
        let mut max = 0.0f64;
        for p in sampler.points().take(16) {
            let base = phi.value(&p).unwrap();
            for i in 0..2 {
                let block = g.block(i);
                let mut q = p.clone();
                for k in block.clone() {
                    q[k] = 0.3 * q[k] - 0.1;
                }
                let phi_diff = base - phi.value(&q).unwrap();
                let env_p = g.env(&p);
                let env_q = g.env(&q);
                let u = &g.players()[i].utility;
                let u_diff = u.eval(&env_p).unwrap() - u.eval(&env_q).unwrap();
                max = max.max((phi_diff - u_diff).abs());
            }
        }
        assert!(max <= 1e-6, "potential-definition residual {max}");
    }

    #[test]
    fn reconstruct_rejects_orbit() {
        let g = orbit_game();
        assert!(matches!(
            g.reconstruct_exact_potential(&Sampler::default_for(2, 0)),
            Err(GameError::NotClosed { .. })
        ));
    }

    #[test]
    fn jacobian_matches_finite_differences_on_random_games() {
        let g = interp_vp_game();
        let h = 1e-5;
        for p in Sampler::default_for(4, 1).points().take(8) {
            let split = g.jacobian(&p).unwrap();
            for i in 0..4 {
                for j in 0..4 {
                    let mut hi = p.clone();
                    let mut lo = p.clone();
                    hi[j] += h;
                    lo[j] -= h;
                    let fd = (g.gradient_at(&hi).unwrap()[i] - g.gradient_at(&lo).unwrap()[i])
                        / (2.0 * h);
                    assert!(
                        (split.j[(i, j)] - fd).abs() <= 1e-6 * (1.0 + fd.abs()),
                        "J[{i}][{j}] symbolic {} vs fd {fd}",
                        split.j[(i, j)]
                    );
                }
            }
        }
    }

    #[test]
    fn skew_jacobian_implies_zero_divergence() {
        // exactly-skew bilinear game: divergence vanishes identically
        let g = two_player("3*x*y", "-3*x*y");
        assert_eq!(*g.divergence_expr(), Expr::Const(0.0));
        for p in Sampler::default_for(2, 2).points().take(32) {
            assert_eq!(g.divergence(&p).unwrap(), 0.0);
        }
    }
}
