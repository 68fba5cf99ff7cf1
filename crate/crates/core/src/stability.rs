//! Energy-conservation diagnostics: Boris amplification-matrix eigenvalues
//! and the characteristic roots of the Adams-4 corrector stencil under a
//! uniform z-directed magnetic field.

use nalgebra::Matrix3;
use num_complex::Complex64;

use crate::kinematics::Species;
use crate::vec3::Vec3;

/// Antisymmetric rotation generator built from ω:
/// rows (0, ω_z, −ω_y), (−ω_z, 0, ω_x), (ω_y, −ω_x, 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaMatrix(pub Matrix3<f64>);

impl OmegaMatrix {
    pub fn from_omega(w: Vec3) -> Self {
        OmegaMatrix(Matrix3::new(
            0.0, w.z, -w.y, //
            -w.z, 0.0, w.x, //
            w.y, -w.x, 0.0,
        ))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn is_antisymmetric(&self) -> bool {
        (self.0 + self.0.transpose()).amax() == 0.0
    }
}

/// Rotation vector of the Boris velocity update: ω = (dt·q/(m·γ))·B.
pub fn omega_from_b(b: Vec3, sp: &Species, gamma: f64, dt: f64) -> Vec3 {
    b * (dt * sp.q / (sp.m * gamma))
}

/// Rotation vector entering the Adams-4 corrector analysis, which carries
/// the stencil's 1/24 normalization: ω = (dt·q/(24·m·γ))·B.
///
/// γ sits in the denominator (the physical gyrofrequency scaling); the
/// analysis itself takes ω as a direct input so the mapping never affects
/// reported roots.
pub fn omega_from_b_adams(b: Vec3, sp: &Species, gamma: f64, dt: f64) -> Vec3 {
    omega_from_b(b, sp, gamma, dt) / 24.0
}

/// Eigenvalue/root bundle for one analyzed stencil.
#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub method: StabilityMethod,
    pub omega: Vec3,
    /// Boris amplification eigenvalues (empty for the Adams analysis).
    pub eigenvalues: Vec<Complex64>,
    /// Adams root sets, one per eigenvalue combination (empty for Boris).
    pub root_sets: Vec<RootSet>,
    pub max_root_magnitude: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilityMethod {
    Boris,
    Adams4,
}

impl StabilityMethod {
    pub fn label(&self) -> &'static str {
        match self {
            StabilityMethod::Boris => "boris",
            StabilityMethod::Adams4 => "adams4",
        }
    }
}

/// One eigenvalue combination (λ₁..λ₄) and the roots of
/// λ₁z³ − λ₂z² + 5λ₃z + λ₄ = 0.
#[derive(Debug, Clone)]
pub struct RootSet {
    pub lambdas: [Complex64; 4],
    pub roots: Vec<Complex64>,
}

impl RootSet {
    /// Residual of root z in the characteristic polynomial.
    pub fn residual(&self, z: Complex64) -> f64 {
        let [l1, l2, l3, l4] = self.lambdas;
        (l1 * z * z * z - l2 * z * z + 5.0 * l3 * z + l4).norm()
    }
}

/// Eigenvalues of M = (I−Ω)⁻¹(I+Ω), the one-step map of the implicit
/// leap-frog velocity stencil (I−Ω)v^{n+1} = (I+Ω)vⁿ.
///
/// I−Ω is always invertible (det = 1 + |ω|²). One eigenvalue is exactly 1
/// (the B-parallel direction); the other two form a conjugate pair of unit
/// magnitude. Ordering: the B-parallel eigenvalue first, then the pair with
/// positive imaginary part first.
pub fn boris_amplification_eigenvalues(omega: Vec3) -> [Complex64; 3] {
    let om = OmegaMatrix::from_omega(omega).0;
    let id = Matrix3::identity();
    let m = (id - om)
        .try_inverse()
        .expect("I - Omega is always invertible")
        * (id + om);
    let eig = m.complex_eigenvalues();
    let mut vals = [eig[0], eig[1], eig[2]];
    vals.sort_by(|a, b| {
        ((a - 1.0).norm(), -a.im)
            .partial_cmp(&((b - 1.0).norm(), -b.im))
            .unwrap()
    });
    vals
}

/// Boris stability report over one ω.
pub fn boris_report(omega: Vec3) -> StabilityReport {
    let eigenvalues = boris_amplification_eigenvalues(omega).to_vec();
    let max_root_magnitude = eigenvalues
        .iter()
        .map(|l| l.norm())
        .fold(f64::NEG_INFINITY, f64::max);
    StabilityReport {
        method: StabilityMethod::Boris,
        omega,
        eigenvalues,
        root_sets: Vec::new(),
        max_root_magnitude,
    }
}

/// Characteristic roots of the Adams-4 corrector under B = B ẑ, enumerating
/// the three consistent eigenvalue combinations. For the eigen-direction of
/// Ω with eigenvalue μ ∈ {0, +iω_z, −iω_z}, the projected stencil
/// (I+9Ω)u^{n+1} − (I−19Ω)uⁿ + 5Ωu^{n−1} − Ωu^{n−2} = 0 becomes
/// λ₁z³ − λ₂z² + 5λ₃z + λ₄ = 0 with λ₁ = 1+9μ, λ₂ = 1−19μ, λ₃ = μ,
/// λ₄ = −μ. μ = 0 (the B-parallel direction) factors as z²(z−1) with the
/// unit root; the conjugate pair leaves the unit circle for ω_z ≠ 0.
pub fn adams4_characteristic_roots(omega_z: f64) -> StabilityReport {
    let mus = [
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, omega_z),
        Complex64::new(0.0, -omega_z),
    ];
    let mut root_sets = Vec::with_capacity(3);
    let mut max_mag = f64::NEG_INFINITY;
    for mu in mus {
        let lambdas = [
            Complex64::new(1.0, 0.0) + 9.0 * mu,
            Complex64::new(1.0, 0.0) - 19.0 * mu,
            mu,
            -mu,
        ];
        let roots = solve_cubic(lambdas[0], -lambdas[1], 5.0 * lambdas[2], lambdas[3]);
        for z in &roots {
            max_mag = max_mag.max(z.norm());
        }
        root_sets.push(RootSet { lambdas, roots });
    }
    StabilityReport {
        method: StabilityMethod::Adams4,
        omega: Vec3::new(0.0, 0.0, omega_z),
        eigenvalues: Vec::new(),
        root_sets,
        max_root_magnitude: max_mag,
    }
}

/// Diagnostic-only exhaustive enumeration over the printed eigenvalue sets
/// (λ₃ = λ₄ tied), reproducing the looser "every other combination" sweep.
/// 27 combinations; the consistent ones are a subset up to the λ₄ sign.
pub fn adams4_all_combinations(omega_z: f64) -> Vec<RootSet> {
    let i = Complex64::i();
    let one = Complex64::new(1.0, 0.0);
    let l1s = [one, one - 9.0 * i * omega_z, one + 9.0 * i * omega_z];
    let l2s = [one, one + 19.0 * i * omega_z, one - 19.0 * i * omega_z];
    let l3s = [Complex64::new(0.0, 0.0), i * omega_z, -i * omega_z];
    let mut out = Vec::with_capacity(27);
    for l1 in l1s {
        for l2 in l2s {
            for l3 in l3s {
                let lambdas = [l1, l2, l3, l3];
                let roots = solve_cubic(l1, -l2, 5.0 * l3, l3);
                out.push(RootSet { lambdas, roots });
            }
        }
    }
    out
}

/// Roots of c3·z³ + c2·z² + c1·z + c0 with complex coefficients.
///
/// Exact zero trailing coefficients are deflated first so structural roots
/// at the origin come out exactly; the remainder is solved by Cardano's
/// formula and polished with two Newton steps.
pub fn solve_cubic(c3: Complex64, c2: Complex64, c1: Complex64, c0: Complex64) -> Vec<Complex64> {
    assert!(c3.norm() > 0.0, "leading coefficient must be nonzero");
    let mut coeffs = vec![c3, c2, c1, c0];
    let mut zero_roots = 0;
    while coeffs.len() > 1 && coeffs.last().unwrap().norm() == 0.0 {
        coeffs.pop();
        zero_roots += 1;
    }
    let mut roots = vec![Complex64::new(0.0, 0.0); zero_roots];
    match coeffs.len() {
        1 => {}
        2 => roots.push(-coeffs[1] / coeffs[0]),
        3 => {
            let (a, b, c) = (coeffs[0], coeffs[1], coeffs[2]);
            let disc = (b * b - 4.0 * a * c).sqrt();
            // pick the sign that avoids cancellation in -b ± disc
            let q = if (b + disc).norm() >= (b - disc).norm() {
                -0.5 * (b + disc)
            } else {
                -0.5 * (b - disc)
            };
            roots.push(q / a);
            roots.push(c / q);
        }
        4 => {
            let a = coeffs[1] / coeffs[0];
            let b = coeffs[2] / coeffs[0];
            let c = coeffs[3] / coeffs[0];
            let p = b - a * a / 3.0;
            let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
            let disc = (q * q / 4.0 + p * p * p / 27.0).sqrt();
            let cand1 = -q / 2.0 + disc;
            let cand2 = -q / 2.0 - disc;
            let u_cubed = if cand1.norm() >= cand2.norm() {
                cand1
            } else {
                cand2
            };
            if u_cubed.norm() == 0.0 {
                for _ in 0..3 {
                    roots.push(-a / 3.0);
                }
            } else {
                let u = u_cubed.cbrt();
                let w = Complex64::new(-0.5, 0.75f64.sqrt());
                for j in 0..3 {
                    let uj = u * w.powu(j);
                    let t = uj - p / (3.0 * uj);
                    roots.push(t - a / 3.0);
                }
            }
            // Newton polish on the original cubic
            let poly = |z: Complex64| ((coeffs[0] * z + coeffs[1]) * z + coeffs[2]) * z + coeffs[3];
            let dpoly = |z: Complex64| (3.0 * coeffs[0] * z + 2.0 * coeffs[1]) * z + coeffs[2];
            for z in roots.iter_mut().skip(zero_roots) {
                for _ in 0..2 {
                    let d = dpoly(*z);
                    if d.norm() > 0.0 {
                        *z -= poly(*z) / d;
                    }
                }
            }
        }
        _ => unreachable!(),
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    /// Deterministic low-discrepancy ω values in [-10, 10]^3.
    fn weyl_omegas(n: usize) -> Vec<Vec3> {
        let a = [
            0.618_033_988_749_894_9,
            0.414_213_562_373_095_1,
            0.732_050_807_568_877_3,
        ];
        (1..=n)
            .map(|i| {
                Vec3::new(
                    20.0 * ((i as f64 * a[0]).fract()) - 10.0,
                    20.0 * ((i as f64 * a[1]).fract()) - 10.0,
                    20.0 * ((i as f64 * a[2]).fract()) - 10.0,
                )
            })
            .collect()
    }

    #[test]
    fn omega_matrix_pattern_and_antisymmetry() {
        let m = OmegaMatrix::from_omega(Vec3::new(1.0, 2.0, 3.0));
        assert!(m.is_antisymmetric());
        assert_eq!(m.0[(0, 1)], 3.0);
        assert_eq!(m.0[(0, 2)], -2.0);
        assert_eq!(m.0[(1, 2)], 1.0);
    }

    #[test]
    fn omega_from_b_scalings() {
        let sp = Species::new(1.0, 1.0);
        let w = omega_from_b(Vec3::new(0.0, 0.0, 1.0), &sp, 1.0, 1.0);
        assert_eq!(w, Vec3::new(0.0, 0.0, 1.0));
        let w2 = omega_from_b(Vec3::new(0.0, 0.0, 1.0), &sp, 2.0, 0.5);
        assert_relative_eq!(w2.z, 0.25, max_relative = 1e-15);
        assert_eq!(omega_from_b(Vec3::ZERO, &sp, 1.5, 0.3), Vec3::ZERO);
        let wa = omega_from_b_adams(Vec3::new(0.0, 0.0, 1.0), &sp, 1.0, 1.0);
        assert_relative_eq!(wa.z, 1.0 / 24.0, max_relative = 1e-15);
    }

    #[test]
    fn boris_zero_omega_gives_identity() {
        let eig = boris_amplification_eigenvalues(Vec3::ZERO);
        for l in eig {
            assert_abs_diff_eq!(l.re, 1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(l.im, 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn boris_half_omega_z_closed_form() {
        // |ω|² = 0.25: (1 − 0.25 ± 2i·0.5)/1.25 = 0.6 ± 0.8i
        let eig = boris_amplification_eigenvalues(Vec3::new(0.0, 0.0, 0.5));
        assert_abs_diff_eq!(eig[0].re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eig[0].im, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eig[1].re, 0.6, epsilon = 1e-12);
        assert_abs_diff_eq!(eig[1].im, 0.8, epsilon = 1e-12);
        assert_abs_diff_eq!(eig[2].re, 0.6, epsilon = 1e-12);
        assert_abs_diff_eq!(eig[2].im, -0.8, epsilon = 1e-12);
    }

    #[test]
    fn boris_unit_magnitude_for_random_omegas() {
        let mut worst: f64 = 0.0;
        for w in weyl_omegas(1000) {
            for l in boris_amplification_eigenvalues(w) {
                worst = worst.max((l.norm() - 1.0).abs());
            }
        }
        assert!(worst <= 1e-12, "worst | |λ|−1 | = {worst:.3e}");
    }

    #[test]
    fn boris_unit_determinant_and_conjugate_pairs() {
        for w in weyl_omegas(200) {
            let eig = boris_amplification_eigenvalues(w);
            let det: Complex64 = eig.iter().product();
            assert!((det.norm() - 1.0).abs() <= 1e-12);
            // non-real eigenvalues come as a conjugate pair
            assert_abs_diff_eq!(eig[1].im, -eig[2].im, epsilon = 1e-12);
            assert_abs_diff_eq!(eig[1].re, eig[2].re, epsilon = 1e-12);
        }
    }

    #[test]
    fn adams_trivial_combination_keeps_unit_root() {
        for w in [0.0, 0.1, 0.5] {
            let report = adams4_characteristic_roots(w);
            let trivial = &report.root_sets[0];
            let mut mags: Vec<f64> = trivial.roots.iter().map(|z| z.norm()).collect();
            mags.sort_by(f64::total_cmp);
            assert!(mags[0] <= 1e-10 && mags[1] <= 1e-10, "zero roots {mags:?}");
            assert!((mags[2] - 1.0).abs() <= 1e-10, "unit root {mags:?}");
        }
    }

    #[test]
    fn adams_conjugate_combinations_leave_unit_circle() {
        for w in [0.05, 0.1, 0.2, 0.5] {
            let report = adams4_characteristic_roots(w);
            let off = report.root_sets[1..]
                .iter()
                .flat_map(|s| s.roots.iter())
                .map(|z| z.norm())
                .fold(f64::NEG_INFINITY, f64::max);
            assert!(
                (off - 1.0).abs() >= 1e-6,
                "ω_z = {w}: max root magnitude {off}"
            );
        }
    }

    #[test]
    fn adams_root_residuals_are_small() {
        for w in [0.0, 0.05, 0.1, 0.2, 0.5, 2.0] {
            let report = adams4_characteristic_roots(w);
            for set in &report.root_sets {
                for &z in &set.roots {
                    let bound = 1e-10 * z.norm().powi(3).max(1.0);
                    assert!(
                        set.residual(z) <= bound,
                        "residual {:.3e} at z = {z} (ω_z = {w})",
                        set.residual(z)
                    );
                }
            }
        }
    }

    #[test]
    fn exhaustive_mode_covers_27_combinations() {
        let sets = adams4_all_combinations(0.1);
        assert_eq!(sets.len(), 27);
        // the all-unit combination still shows the z=1 root
        let trivial = &sets[0];
        let has_unit = trivial.roots.iter().any(|z| (z - 1.0).norm() <= 1e-10);
        assert!(has_unit);
    }

    #[test]
    fn cubic_solver_known_roots() {
        let one = Complex64::new(1.0, 0.0);
        // (z-1)(z-2)(z-3) = z^3 - 6z^2 + 11z - 6
        let mut roots = solve_cubic(
            one,
            Complex64::new(-6.0, 0.0),
            Complex64::new(11.0, 0.0),
            Complex64::new(-6.0, 0.0),
        );
        roots.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        for (r, expect) in roots.iter().zip([1.0, 2.0, 3.0]) {
            assert_abs_diff_eq!(r.re, expect, epsilon = 1e-12);
            assert_abs_diff_eq!(r.im, 0.0, epsilon = 1e-12);
        }
    }
}
