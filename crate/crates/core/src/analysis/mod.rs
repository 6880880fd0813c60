//! Threshold and stability analysis around the rumor-free equilibrium.

mod endemic;
pub mod poly;

pub use endemic::{endemic_equilibrium, endemic_equilibrium_with_tol, EndemicSolution, ENDEMIC_TOL};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, Mat2, Mat3, Mat4};
use crate::model::{ModelParams, State};

/// Real parts within this distance of zero give a [`Verdict::Marginal`].
pub const STABILITY_TOL: f64 = 1e-9;

fn require_mu(th: &ModelParams) -> Result<()> {
    if th.mu > 0.0 && th.mu.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("mu", "mu > 0 required"))
    }
}

/// Rumor-free equilibrium `(pi/mu, 0, 0, 0)`.
pub fn rumor_free_equilibrium(th: &ModelParams) -> Result<State> {
    require_mu(th)?;
    Ok(State::new(th.pi / th.mu, 0.0, 0.0, 0.0))
}

/// New-spreader (`f`) and transfer (`v`) matrices over the (e, i) block and
/// the next-generation matrix `k = f v^-1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NextGenMatrices {
    pub f: Mat2,
    pub v: Mat2,
    pub k: Mat2,
}

impl NextGenMatrices {
    pub fn det_v(&self) -> f64 {
        self.v[0][0] * self.v[1][1] - self.v[0][1] * self.v[1][0]
    }

    pub fn spectral_radius(&self) -> f64 {
        linalg::spectral_radius2(&self.k)
    }
}

pub fn next_generation(th: &ModelParams) -> Result<NextGenMatrices> {
    require_mu(th)?;
    let s0 = th.pi / th.mu;
    let f = [[0.0, (1.0 - th.p) * th.beta * s0], [0.0, th.p * th.beta * s0]];
    let v = [[th.eps + th.mu, 0.0], [-th.eps, th.delta + th.mu]];
    let v_inv = linalg::mat2_inv(&v).ok_or_else(|| Error::domain("mu", "transfer matrix is singular"))?;
    Ok(NextGenMatrices {
        f,
        v,
        k: linalg::mat2_mul(&f, &v_inv),
    })
}

/// Basic reproduction number, `beta pi (eps + p mu) / (mu (eps + mu) (delta + mu))`.
pub fn r0(th: &ModelParams) -> Result<f64> {
    require_mu(th)?;
    Ok(th.beta * th.pi * (th.eps + th.p * th.mu) / (th.mu * (th.eps + th.mu) * (th.delta + th.mu)))
}

/// Jacobian of the uncontrolled right-hand side at an arbitrary state.
/// Rows and columns are ordered (s, e, i, z).
pub fn jacobian(x: &State, th: &ModelParams) -> Mat4 {
    let State { s, e, i, z } = *x;
    let ModelParams {
        mu,
        beta,
        b,
        rho,
        eps,
        p,
        l,
        delta,
        lam,
        ..
    } = *th;
    [
        [-mu - beta * i - b * z, 0.0, -beta * s, -b * s],
        [
            (1.0 - p) * beta * i + (1.0 - l) * b * z,
            -rho * i - eps - mu,
            (1.0 - p) * beta * s - rho * e,
            (1.0 - l) * b * s,
        ],
        [
            p * beta * i,
            rho * i + eps,
            p * beta * s + rho * e - delta - lam * z - mu,
            -lam * i,
        ],
        [l * b * z, 0.0, delta + lam * z, l * b * s + lam * i - mu],
    ]
}

/// Jacobian at the rumor-free equilibrium.
pub fn jacobian_rfe(th: &ModelParams) -> Result<Mat4> {
    Ok(jacobian(&rumor_free_equilibrium(th)?, th))
}

fn lower_block(j: &Mat4) -> Mat3 {
    let mut m = [[0.0; 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            m[r][c] = j[r + 1][c + 1];
        }
    }
    m
}

/// Coefficients `(a2, a1, a0)` of the cubic factor of the rumor-free
/// characteristic polynomial, from the invariants of the (e, i, z) block.
pub fn cubic_coefficients(th: &ModelParams) -> Result<(f64, f64, f64)> {
    let m = lower_block(&jacobian_rfe(th)?);
    Ok((
        -linalg::trace3(&m),
        linalg::principal_minors_sum3(&m),
        -linalg::det3(&m),
    ))
}

/// Closed form `eps + delta + 3 mu - p beta pi/mu - l b pi/mu`, which must
/// equal the `a2` from [`cubic_coefficients`].
pub fn a2_closed_form(th: &ModelParams) -> f64 {
    let s0 = th.pi / th.mu;
    th.eps + th.delta + 3.0 * th.mu - th.p * th.beta * s0 - th.l * th.b * s0
}

/// Routh-Hurwitz test for `x^3 + a2 x^2 + a1 x + a0`.
pub fn routh_hurwitz(a2: f64, a1: f64, a0: f64) -> bool {
    a2 > 0.0 && a0 > 0.0 && a2 * a1 > a0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    LocallyStable,
    Unstable,
    Marginal,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::LocallyStable => "locally stable",
            Verdict::Unstable => "unstable",
            Verdict::Marginal => "marginal",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub r0: f64,
    pub rfe: State,
    pub jacobian: Mat4,
    /// `-mu` first, then the cubic-factor roots by descending real part.
    pub eigenvalues: [Complex64; 4],
    pub a2: f64,
    pub a1: f64,
    pub a0: f64,
    pub routh_hurwitz_pass: bool,
    pub max_real_part: f64,
    pub verdict: Verdict,
    /// Whether `r0 < 1` and the Routh-Hurwitz verdict agree. The skeptic
    /// recruitment path shifts the stability boundary away from `r0 = 1`
    /// when `b > 0`, so they can disagree close to the threshold.
    pub threshold_agrees: bool,
}

/// Eigenvalues of the rumor-free Jacobian, using its known factor `-mu`.
pub fn rfe_eigenvalues(th: &ModelParams) -> Result<[Complex64; 4]> {
    let (a2, a1, a0) = cubic_coefficients(th)?;
    let [r1, r2, r3] = poly::monic_cubic_roots(a2, a1, a0);
    Ok([Complex64::new(-th.mu, 0.0), r1, r2, r3])
}

pub fn stability_report(th: &ModelParams) -> Result<StabilityReport> {
    let rfe = rumor_free_equilibrium(th)?;
    let jacobian = jacobian(&rfe, th);
    let (a2, a1, a0) = cubic_coefficients(th)?;
    let closed = a2_closed_form(th);
    if (closed - a2).abs() > 1e-9 * (1.0 + a2.abs()) {
        log::warn!("a2 closed form {closed} disagrees with -trace {a2}");
    }
    let eigenvalues = rfe_eigenvalues(th)?;
    let max_real_part = eigenvalues.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max);
    let verdict = if max_real_part < -STABILITY_TOL {
        Verdict::LocallyStable
    } else if max_real_part > STABILITY_TOL {
        Verdict::Unstable
    } else {
        Verdict::Marginal
    };
    let r0 = r0(th)?;
    let routh_hurwitz_pass = routh_hurwitz(a2, a1, a0);
    let threshold_agrees = (r0 < 1.0) == routh_hurwitz_pass;
    if !threshold_agrees {
        log::info!("R0 = {r0} and Routh-Hurwitz ({routh_hurwitz_pass}) disagree");
    }
    Ok(StabilityReport {
        r0,
        rfe,
        jacobian,
        eigenvalues,
        a2,
        a1,
        a0,
        routh_hurwitz_pass,
        max_real_part,
        verdict,
        threshold_agrees,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::rhs_uncontrolled;
    use crate::presets::{fig12_params, fig3_params};
    use approx::assert_relative_eq;

    #[test]
    fn rfe_examples() {
        assert_eq!(
            rumor_free_equilibrium(&fig3_params()).unwrap(),
            State::new(20.0, 0.0, 0.0, 0.0)
        );
        assert_eq!(
            rumor_free_equilibrium(&fig12_params()).unwrap(),
            State::new(100.0, 0.0, 0.0, 0.0)
        );
        let th = ModelParams {
            pi: 0.0,
            ..fig3_params()
        };
        assert_eq!(rumor_free_equilibrium(&th).unwrap(), State::ZERO);
        let th = ModelParams {
            mu: 0.0,
            ..fig3_params()
        };
        assert!(matches!(rumor_free_equilibrium(&th), Err(Error::Domain { .. })));
    }

    #[test]
    fn next_generation_fig3() {
        let th = fig3_params();
        let ng = next_generation(&th).unwrap();
        assert_relative_eq!(ng.det_v(), 0.308, epsilon = 1e-14);
        // entrywise closed forms of k
        let d = th.mu * (th.eps + th.mu) * (th.delta + th.mu);
        let want = [
            [
                (1.0 - th.p) * th.beta * th.eps * th.pi / d,
                (1.0 - th.p) * th.beta * th.pi / (th.mu * (th.delta + th.mu)),
            ],
            [
                th.p * th.beta * th.eps * th.pi / d,
                th.p * th.beta * th.pi / (th.mu * (th.delta + th.mu)),
            ],
        ];
        for (got, want) in ng.k.iter().flatten().zip(want.iter().flatten()) {
            assert_relative_eq!(*got, *want, max_relative = 1e-13);
        }
        let th = ModelParams {
            p: 1.0,
            ..fig3_params()
        };
        let ng = next_generation(&th).unwrap();
        assert_eq!(ng.k[0], [0.0, 0.0]);
    }

    #[test]
    fn r0_examples() {
        assert_relative_eq!(r0(&fig3_params()).unwrap(), 0.0494704, epsilon = 1e-6);
        assert_relative_eq!(r0(&fig12_params()).unwrap(), 2.4735227, epsilon = 1e-6);
        assert_eq!(
            r0(&ModelParams {
                beta: 0.0,
                ..fig3_params()
            })
            .unwrap(),
            0.0
        );
        for th in [fig3_params(), fig12_params()] {
            let ng = next_generation(&th).unwrap();
            assert_relative_eq!(r0(&th).unwrap(), ng.spectral_radius(), max_relative = 1e-12);
        }
    }

    #[test]
    fn jacobian_rfe_structure() {
        let th = fig3_params();
        let j = jacobian_rfe(&th).unwrap();
        assert_eq!(j[0][0], -th.mu);
        assert_eq!([j[1][0], j[2][0], j[3][0]], [0.0; 3]);
        // matches the published rumor-free matrix
        let s0 = th.pi / th.mu;
        let want = [
            [-th.mu, 0.0, -th.beta * s0, -th.b * s0],
            [
                0.0,
                -th.eps - th.mu,
                (1.0 - th.p) * th.beta * s0,
                (1.0 - th.l) * th.b * s0,
            ],
            [0.0, th.eps, th.p * th.beta * s0 - th.delta - th.mu, 0.0],
            [0.0, 0.0, th.delta, th.l * th.b * s0 - th.mu],
        ];
        for r in 0..4 {
            for c in 0..4 {
                assert_relative_eq!(j[r][c], want[r][c], max_relative = 1e-14);
            }
        }
    }

    #[test]
    fn jacobian_matches_central_differences() {
        let th = fig12_params();
        for x in [rumor_free_equilibrium(&th).unwrap(), State::new(40.0, 3.0, 20.0, 7.0)] {
            let j = jacobian(&x, &th);
            for c in 0..4 {
                let mut up = x.to_array();
                let mut dn = x.to_array();
                let step = 1e-6 * up[c].abs().max(1.0);
                up[c] += step;
                dn[c] -= step;
                let fu = rhs_uncontrolled(&State::from_array(up), &th).to_array();
                let fd = rhs_uncontrolled(&State::from_array(dn), &th).to_array();
                for r in 0..4 {
                    let fdiff = (fu[r] - fd[r]) / (2.0 * step);
                    assert!((fdiff - j[r][c]).abs() < 1e-6, "({r},{c}): {fdiff} vs {}", j[r][c]);
                }
            }
        }
    }

    #[test]
    fn cubic_coefficient_examples() {
        let th = fig3_params();
        let (a2, _, _) = cubic_coefficients(&th).unwrap();
        assert_relative_eq!(a2, a2_closed_form(&th), max_relative = 1e-14);
        assert_relative_eq!(a2, 1.5957619748, epsilon = 1e-9);

        let th = ModelParams {
            beta: 0.0,
            b: 0.0,
            rho: 0.0,
            lam: 0.0,
            ..fig3_params()
        };
        let (a2, a1, a0) = cubic_coefficients(&th).unwrap();
        let (em, dm, mu) = (th.eps + th.mu, th.delta + th.mu, th.mu);
        assert_relative_eq!(a2, th.eps + th.delta + 3.0 * mu, max_relative = 1e-14);
        assert_relative_eq!(a1, em * dm + em * mu + dm * mu, max_relative = 1e-14);
        assert_relative_eq!(a0, em * dm * mu, max_relative = 1e-14);
    }

    #[test]
    fn routh_hurwitz_examples() {
        assert!(routh_hurwitz(3.0, 3.0, 1.0));
        assert!(!routh_hurwitz(1.0, 1.0, 2.0));
        let (a2, a1, a0) = cubic_coefficients(&fig3_params()).unwrap();
        assert!(routh_hurwitz(a2, a1, a0));
        let (a2, a1, a0) = cubic_coefficients(&fig12_params()).unwrap();
        assert!(!routh_hurwitz(a2, a1, a0));
    }

    #[test]
    fn stability_report_presets() {
        let rep = stability_report(&fig3_params()).unwrap();
        assert_eq!(rep.verdict, Verdict::LocallyStable);
        assert_relative_eq!(rep.r0, 0.0495, epsilon = 1e-4);
        assert!(rep.threshold_agrees);
        let rep12 = stability_report(&fig12_params()).unwrap();
        assert_eq!(rep12.verdict, Verdict::Unstable);
        assert_relative_eq!(rep12.r0, 2.4735, epsilon = 1e-4);
        for r in [&rep, &rep12] {
            assert!(r.eigenvalues.iter().any(|l| (l + 0.5).norm() <= 1e-8));
        }
    }

    #[test]
    fn cubic_roots_satisfy_characteristic_polynomial() {
        // each non-trivial eigenvalue annihilates det(J - lambda I)
        for th in [fig3_params(), fig12_params()] {
            let j = jacobian_rfe(&th).unwrap();
            let m = lower_block(&j);
            for lam in &rfe_eigenvalues(&th).unwrap()[1..] {
                let a = |r: usize, c: usize| {
                    Complex64::new(m[r][c], 0.0) - if r == c { *lam } else { Complex64::new(0.0, 0.0) }
                };
                let det = a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1))
                    - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
                    + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
                assert!(det.norm() < 1e-10, "{det}");
            }
        }
    }
}
