//! Eigenvalue bounds for curvature operators under sectional pinching,
//! Weyl-shifted operators in the Einstein case, Weitzenböck constants and
//! the induced vanishing criteria for Betti numbers.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::operators::{
    apply_sym2_action, apply_two_form_action, hat_matrix, restrict, ring_matrix,
    sym2_traceless_subspace, OperatorMatrix, SubspaceBasis, LEAK_TOL,
};
use crate::structure::{sym2_split_with, G2Model, SU3Model};
use crate::tensor::{
    curvature_symmetry_residual, kulkarni_nomizu, metric_tensor, ricci, CurvatureTensor,
    DenseTensor,
};
use crate::Result;

// ---------------------------------------------------------------------------
// Einstein data and sectional pinching

#[derive(Debug, Clone, Copy)]
pub struct EinsteinData {
    pub n: usize,
    pub k: f64,
    /// torsion scalar, only meaningful for the 7-dimensional case
    pub tau0: Option<f64>,
}

impl EinsteinData {
    pub fn new(n: usize, k: f64, tau0: Option<f64>) -> Result<Self> {
        if !(3..=8).contains(&n) {
            return Err(Error::InvalidParameter(format!(
                "Einstein data needs dimension in 3..=8, got {n}"
            )));
        }
        if let Some(t) = tau0 {
            if n != 7 {
                return Err(Error::InvalidParameter(
                    "torsion scalar is only defined in dimension 7".into(),
                ));
            }
            let expected = 3.0 * t * t / 8.0;
            if (expected - k).abs() > 1e-9 * (1.0 + k.abs()) {
                return Err(Error::InvalidParameter(format!(
                    "Einstein constant {k} incompatible with torsion scalar {t}"
                )));
            }
        }
        Ok(EinsteinData { n, k, tau0 })
    }

    /// 7-dimensional case: the Einstein constant is `3 τ₀² / 8`.
    pub fn from_tau0(tau0: f64) -> Result<Self> {
        Self::new(7, 3.0 * tau0 * tau0 / 8.0, Some(tau0))
    }

    /// 6-dimensional case normalized to Einstein constant 5.
    pub fn nearly_kahler() -> Self {
        EinsteinData {
            n: 6,
            k: 5.0,
            tau0: None,
        }
    }

    /// Reads the Einstein constant off a curvature tensor, rejecting
    /// non-Einstein input.
    pub fn from_curvature(r: &CurvatureTensor, tol: f64) -> Result<Self> {
        let n = r.dim();
        let ric = ricci(r)?;
        let scalar: f64 = (0..n).map(|i| ric.get(&[i, i])).sum();
        let k = scalar / n as f64;
        let g = metric_tensor(n)?;
        let mut dev = ric;
        dev.add_scaled(&g, -k)?;
        let residual = dev.max_abs();
        if residual > tol {
            return Err(Error::NotEinstein(residual));
        }
        Self::new(n, k, None)
    }

    pub fn tau0_squared(&self) -> Result<f64> {
        match self.tau0 {
            Some(t) => Ok(t * t),
            None => Err(Error::InvalidParameter(
                "torsion scalar is required but not set".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SectionalBounds {
    pub delta: f64,
    pub delta_cap: f64,
}

impl SectionalBounds {
    pub fn new(delta: f64, delta_cap: f64) -> Result<Self> {
        if delta > delta_cap {
            return Err(Error::InconsistentSectionalBounds(delta, delta_cap));
        }
        Ok(SectionalBounds { delta, delta_cap })
    }

    fn sum(&self) -> f64 {
        self.delta_cap + self.delta
    }

    fn spread(&self) -> f64 {
        self.delta_cap - self.delta
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct IntervalBound {
    pub label: String,
    pub lo: f64,
    pub hi: f64,
}

impl IntervalBound {
    pub fn new(label: impl Into<String>, lo: f64, hi: f64) -> Self {
        IntervalBound {
            label: label.into(),
            lo,
            hi,
        }
    }

    fn centered(label: impl Into<String>, mid: f64, half_width: f64) -> Self {
        Self::new(label, mid - half_width, mid + half_width)
    }

    pub fn intersect(&self, other: &IntervalBound, label: impl Into<String>) -> Result<Self> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        if lo > hi {
            return Err(Error::EmptyIntersection(self.lo, self.hi, other.lo, other.hi));
        }
        Ok(Self::new(label, lo, hi))
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        x >= self.lo - tol && x <= self.hi + tol
    }

    pub fn contains_all(&self, xs: &[f64], tol: f64) -> bool {
        xs.iter().all(|&x| self.contains(x, tol))
    }
}

// ---------------------------------------------------------------------------
// bound theorems

/// Bound for the 2-form operator in any dimension.
pub fn hat_bound_general(n: usize, sb: &SectionalBounds) -> IntervalBound {
    let c = (4.0 * (n / 2) as f64 - 1.0) / 3.0;
    IntervalBound::centered("hat_general", -sb.sum(), c * sb.spread())
}

/// Sharper bound valid on the distinguished 14- or 8-dimensional
/// subspaces in dimensions 7 and 6.
pub fn hat_bound_distinguished(sb: &SectionalBounds) -> IntervalBound {
    IntervalBound::centered("hat_distinguished", -sb.sum(), 7.0 / 3.0 * sb.spread())
}

/// Bounds for the symmetric-action operator: all but one eigenvalue in the
/// first interval, the remaining one (the metric direction) in the second.
pub fn ring_bound_general(n: usize, sb: &SectionalBounds) -> (IntervalBound, IntervalBound) {
    let nf = n as f64;
    (
        IntervalBound::centered(
            "ring_general_main",
            sb.sum() / 2.0,
            (nf - 1.0) / 2.0 * sb.spread(),
        ),
        IntervalBound::new(
            "ring_metric_direction",
            -(nf - 1.0) * sb.delta_cap,
            -(nf - 1.0) * sb.delta,
        ),
    )
}

/// Einstein refinement on traceless symmetric tensors; requires the
/// Einstein constant to sit between the sectional bounds scaled by `n−1`.
pub fn ring_bound_einstein(e: &EinsteinData, sb: &SectionalBounds) -> Result<IntervalBound> {
    let nf = e.n as f64;
    let mean = e.k / (nf - 1.0);
    if sb.delta > mean + 1e-12 || mean > sb.delta_cap + 1e-12 {
        return Err(Error::EinsteinSandwichViolated {
            k: e.k,
            delta: sb.delta,
            delta_cap: sb.delta_cap,
            n: e.n,
        });
    }
    let first = IntervalBound::new(
        "ring_einstein_lower",
        -e.k + nf * sb.delta,
        e.k - (nf - 2.0) * sb.delta,
    );
    let second = IntervalBound::new(
        "ring_einstein_upper",
        e.k - (nf - 2.0) * sb.delta_cap,
        -e.k + nf * sb.delta_cap,
    );
    first.intersect(&second, "ring_einstein")
}

/// Bound on the commuting-traceless block in the 6-dimensional setting.
pub fn nk_ring_plus_bound(sb: &SectionalBounds) -> IntervalBound {
    IntervalBound::new(
        "ring_plus0",
        2.0 * sb.delta - sb.delta_cap,
        2.0 * sb.delta_cap - sb.delta,
    )
}

/// Intersection bound for the 2-form operator on the 8-dimensional block.
pub fn nk_hat8_intersection(sb: &SectionalBounds) -> Result<IntervalBound> {
    let first = IntervalBound::centered("hat8_shifted", -4.0 + sb.sum(), 3.0 * sb.spread());
    let second = hat_bound_distinguished(sb);
    first.intersect(&second, "hat8_intersection")
}

/// Intersection bound for the symmetric operator on the commuting block.
pub fn nk_ring_plus0_intersection(sb: &SectionalBounds) -> Result<IntervalBound> {
    let first = IntervalBound::centered("ring_plus0_direct", sb.sum() / 2.0, 1.5 * sb.spread());
    let second = IntervalBound::centered(
        "ring_plus0_shifted",
        2.0 - sb.sum() / 2.0,
        7.0 / 6.0 * sb.spread(),
    );
    first.intersect(&second, "ring_plus0_intersection")
}

/// Curvature terms of the rough-Laplacian comparison on 2- and 3-forms.
pub fn weitzenboeck_constants(e: &EinsteinData) -> (f64, f64) {
    let nf = e.n as f64;
    (
        2.0 * e.k * (nf - 2.0) / (nf - 1.0),
        3.0 * e.k * (nf - 3.0) / (nf - 1.0),
    )
}

// ---------------------------------------------------------------------------
// Weyl-shifted operators

#[derive(Debug, Clone)]
pub struct WeylOperators {
    /// 2-form action of the Weyl part, over the full 2-form basis
    pub hat: OperatorMatrix,
    /// symmetric action of the Weyl part on traceless tensors
    pub ring_traceless: OperatorMatrix,
}

fn check_einstein(r: &CurvatureTensor, e: &EinsteinData) -> Result<()> {
    if r.dim() != e.n {
        return Err(Error::DimMismatch(r.dim(), e.n));
    }
    let fitted = EinsteinData::from_curvature(r, 1e-8 * (1.0 + r.tensor().max_abs()))?;
    if (fitted.k - e.k).abs() > 1e-8 * (1.0 + e.k.abs()) {
        return Err(Error::InvalidParameter(format!(
            "Einstein constant mismatch: fitted {} vs declared {}",
            fitted.k, e.k
        )));
    }
    Ok(())
}

/// In the Einstein case the Weyl operators differ from the curvature
/// operators by multiples of the identity: `+2k/(n−1)` on 2-forms and
/// `−k/(n−1)` on traceless symmetric tensors.
pub fn weyl_operators(r: &CurvatureTensor, e: &EinsteinData) -> Result<WeylOperators> {
    check_einstein(r, e)?;
    let shift = e.k / (e.n as f64 - 1.0);
    let hat = hat_matrix(r)?.shifted(2.0 * shift);
    let ring = ring_matrix(r)?;
    let sub = sym2_traceless_subspace(e.n)?;
    let ring_traceless = restrict(&ring, &sub, LEAK_TOL)?.shifted(-shift);
    Ok(WeylOperators {
        hat,
        ring_traceless,
    })
}

/// Weyl symmetric action restricted to an invariant subspace of traceless
/// symmetric tensors.
pub fn weyl_ring_on(
    r: &CurvatureTensor,
    e: &EinsteinData,
    sub: &SubspaceBasis,
) -> Result<OperatorMatrix> {
    check_einstein(r, e)?;
    let shift = e.k / (e.n as f64 - 1.0);
    Ok(restrict(&ring_matrix(r)?, sub, LEAK_TOL)?.shifted(-shift))
}

/// Weyl 2-form action restricted to an invariant subspace of 2-forms.
pub fn weyl_hat_on(
    r: &CurvatureTensor,
    e: &EinsteinData,
    sub: &SubspaceBasis,
) -> Result<OperatorMatrix> {
    check_einstein(r, e)?;
    let shift = 2.0 * e.k / (e.n as f64 - 1.0);
    Ok(restrict(&hat_matrix(r)?, sub, LEAK_TOL)?.shifted(shift))
}

// ---------------------------------------------------------------------------
// curvature identities for the 6-dimensional setting

/// Residual of `R̂ω = −2ω` for the invariant 2-form.
pub fn nk_two_form_curvature_residual(
    r: &CurvatureTensor,
    omega: &DenseTensor,
) -> Result<f64> {
    let image = apply_two_form_action(r.tensor(), omega)?;
    Ok(image.add(&omega.scale(2.0))?.max_abs())
}

/// Residual of `R̂ψ = −2ψ` for a 3-form, with the 2-form action applied in
/// the first two slots.
pub fn nk_three_form_curvature_residual(
    r: &CurvatureTensor,
    psi: &DenseTensor,
) -> Result<f64> {
    if psi.rank() != 3 {
        return Err(Error::RankMismatch {
            expected: 3,
            got: psi.rank(),
        });
    }
    let n = r.dim();
    if psi.dim() != n {
        return Err(Error::DimMismatch(psi.dim(), n));
    }
    let image = DenseTensor::from_fn(n, 3, |idx| {
        let mut total = 0.0;
        for k in 0..n {
            for l in 0..n {
                total += r.get(idx[0], idx[1], k, l) * psi.get(&[k, l, idx[2]]);
            }
        }
        total
    })?;
    Ok(image.add(&psi.scale(2.0))?.max_abs())
}

// ---------------------------------------------------------------------------
// Weyl terms in the form Laplacian comparisons

fn check_ricci_free(w: &CurvatureTensor, tol: f64) -> Result<()> {
    let r = ricci(w)?.max_abs();
    if r > tol {
        return Err(Error::Precondition(format!(
            "Weyl-type tensor must be Ricci-free, residual {r:e}"
        )));
    }
    Ok(())
}

fn check_hat_annihilates(w: &CurvatureTensor, sub: &SubspaceBasis, tol: f64) -> Result<()> {
    let hat = hat_matrix(w)?;
    let image = &hat.entries * &sub.vectors;
    let leak = image.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if leak > tol {
        return Err(Error::Precondition(format!(
            "2-form action must vanish on {}, residual {leak:e}",
            sub.label.as_str()
        )));
    }
    Ok(())
}

fn check_symmetric_2tensor(h: &DenseTensor, tol: f64) -> Result<()> {
    let r = h.symmetry_residual_rank2();
    if r > tol {
        return Err(Error::NotSymmetric(r));
    }
    Ok(())
}

fn interior_product_tensor(h: &DenseTensor, sigma: &DenseTensor) -> Result<DenseTensor> {
    crate::tensor::diamond(h, sigma)
}

/// Residual of the 2-form Weyl-term identity: for `h` in the commuting
/// traceless block and a Weyl-type tensor acting within the distinguished
/// 2-form block, `Ŵ(h ⋄ ω) = 2 (W̊h) ⋄ ω`.
pub fn weyl_term_identity_2form(
    w: &CurvatureTensor,
    h: &DenseTensor,
    omega: &DenseTensor,
) -> Result<f64> {
    let scale = 1.0 + w.tensor().max_abs();
    check_ricci_free(w, 1e-8 * scale)?;
    let (part1, part6, _part8) = crate::structure::two_form_subspaces_from_omega(omega)?;
    check_hat_annihilates(w, &part1, 1e-7 * scale)?;
    check_hat_annihilates(w, &part6, 1e-7 * scale)?;
    check_symmetric_2tensor(h, 1e-10 * (1.0 + h.max_abs()))?;
    let split = sym2_split_with(omega, h)?;
    let off_block = (h.max_abs() + 1.0) * 1e-10;
    if split.trace.abs() > off_block || split.minus.max_abs() > off_block {
        return Err(Error::Precondition(
            "2-tensor must lie in the commuting traceless block".into(),
        ));
    }
    let beta = interior_product_tensor(h, omega)?;
    let lhs = apply_two_form_action(w.tensor(), &beta)?;
    let ring_h = apply_sym2_action(w.tensor(), h)?;
    let rhs = interior_product_tensor(&ring_h, omega)?.scale(2.0);
    Ok(lhs.sub(&rhs)?.max_abs())
}

#[derive(Debug, Clone)]
pub struct WeylTerm3FormReport {
    pub gamma_residual: f64,
    pub hat_gamma_residual: f64,
    pub trace_residual: f64,
}

/// Residuals of the 3-form Weyl-term identity in dimension 6: for `h` in
/// the anticommuting block, the cyclic Weyl contraction of `h ⋄ ψ⁺` equals
/// `(W̊h) ⋄ ψ⁺`, with its rank-2 readout equal to `4 W̊h`.
pub fn weyl_term_identity_3form(
    w: &CurvatureTensor,
    h: &DenseTensor,
    su3: &SU3Model,
) -> Result<WeylTerm3FormReport> {
    let scale = 1.0 + w.tensor().max_abs();
    check_ricci_free(w, 1e-8 * scale)?;
    let (part1, part6, _part8) = crate::structure::two_form_subspaces_from_omega(su3.omega())?;
    check_hat_annihilates(w, &part1, 1e-7 * scale)?;
    check_hat_annihilates(w, &part6, 1e-7 * scale)?;
    check_symmetric_2tensor(h, 1e-10 * (1.0 + h.max_abs()))?;
    let split = sym2_split_with(su3.omega(), h)?;
    let off_block = (h.max_abs() + 1.0) * 1e-10;
    if split.trace.abs() > off_block || split.plus0.max_abs() > off_block {
        return Err(Error::Precondition(
            "2-tensor must lie in the anticommuting block".into(),
        ));
    }
    let psi = su3.psi_plus();
    let gamma = cyclic_weyl_contraction(w, h, psi, 1.0)?;
    let ring_h = apply_sym2_action(w.tensor(), h)?;
    let rhs = interior_product_tensor(&ring_h, psi)?;
    let gamma_residual = gamma.sub(&rhs)?.max_abs();
    let decode = su3.decode_3form(&gamma)?;
    let hat_gamma_residual = decode.hat.sub(&ring_h.scale(4.0))?.max_abs();
    let trace_residual: f64 = (0..6).map(|i| decode.hat.get(&[i, i])).sum::<f64>().abs();
    Ok(WeylTerm3FormReport {
        gamma_residual,
        hat_gamma_residual,
        trace_residual,
    })
}

/// Residuals of the 3-form Weyl-term identity in dimension 7: for
/// traceless symmetric `h` and a Weyl-type tensor acting within the
/// 14-dimensional block, the doubled cyclic contraction of `h ⋄ φ` equals
/// `2 (W̊h) ⋄ φ`, with rank-2 readout `8 W̊h`.
pub fn weyl_term_identity_7d(
    w: &CurvatureTensor,
    h: &DenseTensor,
    g2: &G2Model,
) -> Result<WeylTerm3FormReport> {
    let scale = 1.0 + w.tensor().max_abs();
    check_ricci_free(w, 1e-8 * scale)?;
    let (part7, _part14) = crate::structure::g2_two_form_subspaces(g2.psi())?;
    check_hat_annihilates(w, &part7, 1e-7 * scale)?;
    check_symmetric_2tensor(h, 1e-10 * (1.0 + h.max_abs()))?;
    let trace: f64 = (0..7).map(|i| h.get(&[i, i])).sum();
    if trace.abs() > 1e-10 * (1.0 + h.max_abs()) {
        return Err(Error::Precondition("2-tensor must be traceless".into()));
    }
    let phi = g2.phi();
    let gamma = cyclic_weyl_contraction(w, h, phi, 2.0)?;
    let ring_h = apply_sym2_action(w.tensor(), h)?;
    let rhs = interior_product_tensor(&ring_h, phi)?.scale(2.0);
    let gamma_residual = gamma.sub(&rhs)?.max_abs();
    let decode = g2.decode_3form(&gamma)?;
    let hat_gamma_residual = decode.hat.sub(&ring_h.scale(8.0))?.max_abs();
    let trace_residual: f64 = (0..7).map(|i| decode.hat.get(&[i, i])).sum::<f64>().abs();
    Ok(WeylTerm3FormReport {
        gamma_residual,
        hat_gamma_residual,
        trace_residual,
    })
}

/// `γ_{abc} = c · h_{ps} (W_{abpu} σ_{suc} + W_{acpu} σ_{sbu} + W_{bcpu} σ_{asu})`.
fn cyclic_weyl_contraction(
    w: &CurvatureTensor,
    h: &DenseTensor,
    sigma: &DenseTensor,
    factor: f64,
) -> Result<DenseTensor> {
    let n = w.dim();
    DenseTensor::from_fn(n, 3, |idx| {
        let (a, b, c) = (idx[0], idx[1], idx[2]);
        let mut total = 0.0;
        for p in 0..n {
            for s in 0..n {
                let hps = h.get(&[p, s]);
                if hps == 0.0 {
                    continue;
                }
                for u in 0..n {
                    total += hps
                        * (w.get(a, b, p, u) * sigma.get(&[s, u, c])
                            + w.get(a, c, p, u) * sigma.get(&[s, b, u])
                            + w.get(b, c, p, u) * sigma.get(&[a, s, u]));
                }
            }
        }
        factor * total
    })
}

// ---------------------------------------------------------------------------
// synthetic Weyl-type tensors

/// Random curvature tensor whose 2-form action lives in the given
/// subspace on both index pairs, built by alternating orthogonal
/// projections (pair symmetries, Bianchi, Ricci removal, block
/// compression) until the tensor is stationary.
pub fn synthetic_weyl_in(sub: &SubspaceBasis, seed: u64) -> Result<CurvatureTensor> {
    let n = sub.ambient.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random_sym = |rng: &mut ChaCha8Rng| -> Result<DenseTensor> {
        let mut s = DenseTensor::zeros(n, 2)?;
        for i in 0..n {
            for j in i..n {
                let v = rng.gen_range(-1.0..1.0);
                s.set(&[i, j], v);
                s.set(&[j, i], v);
            }
        }
        Ok(s)
    };
    let mut a = kulkarni_nomizu(&random_sym(&mut rng)?, &random_sym(&mut rng)?)?
        .tensor()
        .clone();
    a.add_scaled(
        kulkarni_nomizu(&random_sym(&mut rng)?, &random_sym(&mut rng)?)?.tensor(),
        1.0,
    )?;

    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let projector = &sub.vectors * sub.vectors.transpose();

    let mut previous = a.clone();
    for _ in 0..2000 {
        a = bianchi_free_part(&a)?;
        a = weyl_part(&a)?;
        a = compress_two_form_blocks(&a, &pairs, &projector)?;
        let delta = a.sub(&previous)?.max_abs();
        previous = a.clone();
        if delta < 1e-15 * (1.0 + a.max_abs()) {
            break;
        }
    }
    let norm = a.max_abs();
    if norm < 1e-9 {
        return Err(Error::InvalidParameter(
            "projection onto the Weyl-type block collapsed to zero".into(),
        ));
    }
    a = a.scale(1.0 / norm);
    let tol = 1e-9;
    let residual = curvature_symmetry_residual(&a);
    if residual > tol {
        return Err(Error::SymmetryViolation(residual));
    }
    CurvatureTensor::new(a, tol)
}

fn bianchi_free_part(a: &DenseTensor) -> Result<DenseTensor> {
    let n = a.dim();
    let tau = DenseTensor::from_fn(n, 4, |idx| {
        let (i, j, k, l) = (idx[0], idx[1], idx[2], idx[3]);
        (a.get(&[i, j, k, l]) + a.get(&[k, i, j, l]) + a.get(&[j, k, i, l])) / 3.0
    })?;
    a.sub(&tau)
}

fn weyl_part(a: &DenseTensor) -> Result<DenseTensor> {
    let n = a.dim();
    let nf = n as f64;
    let ric = DenseTensor::from_fn(n, 2, |idx| {
        (0..n).map(|k| a.get(&[k, idx[0], idx[1], k])).sum()
    })?;
    let scalar: f64 = (0..n).map(|i| ric.get(&[i, i])).sum();
    let g = metric_tensor(n)?;
    let mut ric0 = ric;
    ric0.add_scaled(&g, -scalar / nf)?;
    let mut out = a.clone();
    out.add_scaled(
        kulkarni_nomizu(&g, &g)?.tensor(),
        -scalar / (2.0 * nf * (nf - 1.0)),
    )?;
    // symmetrize the traceless Ricci factor pairing before subtracting
    let ric_sym = DenseTensor::from_fn(n, 2, |idx| {
        (ric0.get(&[idx[0], idx[1]]) + ric0.get(&[idx[1], idx[0]])) / 2.0
    })?;
    out.add_scaled(kulkarni_nomizu(&ric_sym, &g)?.tensor(), -1.0 / (nf - 2.0))?;
    Ok(out)
}

fn compress_two_form_blocks(
    a: &DenseTensor,
    pairs: &[(usize, usize)],
    projector: &DMatrix<f64>,
) -> Result<DenseTensor> {
    let n = a.dim();
    let m = pairs.len();
    let mut mat = DMatrix::zeros(m, m);
    for (row, &(i, j)) in pairs.iter().enumerate() {
        for (col, &(k, l)) in pairs.iter().enumerate() {
            mat[(row, col)] = 2.0 * a.get(&[i, j, k, l]);
        }
    }
    let compressed = projector * mat * projector;
    let mut out = DenseTensor::zeros(n, 4)?;
    for (row, &(i, j)) in pairs.iter().enumerate() {
        for (col, &(k, l)) in pairs.iter().enumerate() {
            let v = compressed[(row, col)] / 2.0;
            out.set(&[i, j, k, l], v);
            out.set(&[j, i, k, l], -v);
            out.set(&[i, j, l, k], -v);
            out.set(&[j, i, l, k], v);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Betti number criteria

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ManifoldKind {
    NearlyG2,
    NearlyKahler,
}

impl ManifoldKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ManifoldKind::NearlyG2 => "nearly_g2",
            ManifoldKind::NearlyKahler => "nearly_kahler",
        }
    }
}

/// Minimal eigenvalues of the Weyl operators on the blocks entering the
/// vanishing criteria.
#[derive(Debug, Clone, Copy)]
pub struct SpectralMinima {
    /// Weyl 2-form action on the distinguished block (14- or 8-dim)
    pub hat_distinguished: f64,
    /// Weyl symmetric action on all traceless tensors (7-dim case)
    pub ring_traceless: Option<f64>,
    /// Weyl symmetric action on the commuting traceless block (6-dim case)
    pub ring_plus0: Option<f64>,
    /// Weyl symmetric action on the anticommuting block (6-dim case)
    pub ring_minus: Option<f64>,
}

#[derive(Debug, Clone)]
pub enum BettiInputs {
    Spectral(SpectralMinima),
    Sectional(SectionalBounds),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Zero,
    NoConclusion,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct BettiCondition {
    pub id: &'static str,
    pub observed: f64,
    pub threshold: f64,
    /// `true` when the observed value must be at least the threshold,
    /// `false` when it must be at most the threshold
    pub lower_bound: bool,
    pub holds: bool,
}

impl BettiCondition {
    fn at_least(id: &'static str, observed: f64, threshold: f64) -> Self {
        BettiCondition {
            id,
            observed,
            threshold,
            lower_bound: true,
            holds: observed >= threshold,
        }
    }

    fn at_most(id: &'static str, observed: f64, threshold: f64) -> Self {
        BettiCondition {
            id,
            observed,
            threshold,
            lower_bound: false,
            holds: observed <= threshold,
        }
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct BettiReport {
    pub manifold: &'static str,
    pub b2: Verdict,
    pub b3: Verdict,
    pub conditions: Vec<BettiCondition>,
}

fn require(value: Option<f64>, what: &str) -> Result<f64> {
    value.ok_or_else(|| Error::InvalidParameter(format!("missing spectral minimum: {what}")))
}

/// Evaluates the sufficient conditions for vanishing of the second and
/// third Betti numbers. A failed condition never asserts non-vanishing.
pub fn betti_conditions(
    kind: ManifoldKind,
    inputs: &BettiInputs,
    einstein: &EinsteinData,
) -> Result<BettiReport> {
    let mut conditions = Vec::new();
    let (b2, b3) = match (kind, inputs) {
        (ManifoldKind::NearlyG2, BettiInputs::Spectral(m)) => {
            let t2 = einstein.tau0_squared()?;
            let ring = require(m.ring_traceless, "ring_traceless")?;
            let c_b2 = BettiCondition::at_least("b2_hat14", m.hat_distinguished, -5.0 * t2 / 8.0);
            let c_b3a = BettiCondition::at_least("b3_ring_s20", ring, -3.0 * t2 / 8.0);
            let c_b3b = BettiCondition::at_least("b3_hat14", m.hat_distinguished, -t2 / 4.0);
            let b2 = verdict(c_b2.holds);
            let b3 = verdict(c_b3a.holds || c_b3b.holds);
            conditions.extend([c_b2, c_b3a, c_b3b]);
            (b2, b3)
        }
        (ManifoldKind::NearlyG2, BettiInputs::Sectional(sb)) => {
            let t2 = einstein.tau0_squared()?;
            let lhs = -sb.sum() - 7.0 / 3.0 * sb.spread();
            let c_b2 = BettiCondition::at_least("b2_sectional", lhs, -3.0 * t2 / 4.0);
            let c_b3a = BettiCondition::at_most("b3_upper", sb.delta_cap, 11.0 * t2 / 80.0);
            let c_b3b = BettiCondition::at_least("b3_lower", sb.delta, t2 / 112.0);
            let b2 = verdict(c_b2.holds);
            let b3 = verdict(c_b3a.holds || c_b3b.holds);
            conditions.extend([c_b2, c_b3a, c_b3b]);
            (b2, b3)
        }
        (ManifoldKind::NearlyKahler, BettiInputs::Spectral(m)) => {
            let plus0 = require(m.ring_plus0, "ring_plus0")?;
            let minus = require(m.ring_minus, "ring_minus")?;
            let c_b2a = BettiCondition::at_least("b2_hat8", m.hat_distinguished, -8.0);
            let c_b2b = BettiCondition::at_least("b2_ring_plus0", plus0, -4.0);
            let c_b3a = BettiCondition::at_least("b3_ring_minus", minus, -4.5);
            let c_b3b = BettiCondition::at_least("b3_hat8", m.hat_distinguished, -3.0);
            let b2 = verdict(c_b2a.holds || c_b2b.holds);
            let b3 = verdict(c_b3a.holds || c_b3b.holds);
            conditions.extend([c_b2a, c_b2b, c_b3a, c_b3b]);
            (b2, b3)
        }
        (ManifoldKind::NearlyKahler, BettiInputs::Sectional(sb)) => {
            let lhs1 = -sb.sum() - 7.0 / 3.0 * sb.spread();
            let lhs2 = sb.sum() - 3.0 * sb.spread();
            let c_b2a = BettiCondition::at_least("b2_sectional_hat", lhs1, -10.0);
            let c_b2b = BettiCondition::at_least("b2_sectional_shifted", lhs2, -6.0);
            let c_b3a = BettiCondition::at_least("b3_lower", sb.delta, 0.25);
            let c_b3b = BettiCondition::at_most("b3_upper", sb.delta_cap, 17.0 / 8.0);
            let b2 = verdict(c_b2a.holds || c_b2b.holds);
            let b3 = verdict(c_b3a.holds || c_b3b.holds);
            conditions.extend([c_b2a, c_b2b, c_b3a, c_b3b]);
            (b2, b3)
        }
    };
    Ok(BettiReport {
        manifold: kind.as_str(),
        b2,
        b3,
        conditions,
    })
}

fn verdict(holds: bool) -> Verdict {
    if holds {
        Verdict::Zero
    } else {
        Verdict::NoConclusion
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pinch(delta: f64, delta_cap: f64) -> SectionalBounds {
        SectionalBounds::new(delta, delta_cap).unwrap()
    }

    #[test]
    fn general_two_form_bound_in_dimension_six() {
        let b = hat_bound_general(6, &pinch(0.0, 2.25));
        assert_abs_diff_eq!(b.lo, -10.5, epsilon = 1e-12);
        assert_abs_diff_eq!(b.hi, 6.0, epsilon = 1e-12);
    }

    #[test]
    fn einstein_refinement_intersects_both_intervals() {
        let e = EinsteinData::nearly_kahler();
        let b = ring_bound_einstein(&e, &pinch(0.0, 2.25)).unwrap();
        assert_abs_diff_eq!(b.lo, -4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b.hi, 5.0, epsilon = 1e-12);
    }

    #[test]
    fn einstein_refinement_needs_constant_between_bounds() {
        let e = EinsteinData::nearly_kahler();
        assert!(matches!(
            ring_bound_einstein(&e, &pinch(2.0, 3.0)),
            Err(Error::EinsteinSandwichViolated { .. })
        ));
    }

    #[test]
    fn distinguished_intersections_for_flat_lower_bound() {
        let sb = pinch(0.0, 2.25);
        let hat8 = nk_hat8_intersection(&sb).unwrap();
        assert_abs_diff_eq!(hat8.lo, -7.5, epsilon = 1e-12);
        assert_abs_diff_eq!(hat8.hi, 3.0, epsilon = 1e-12);
        let plus0 = nk_ring_plus0_intersection(&sb).unwrap();
        assert_abs_diff_eq!(plus0.lo, -1.75, epsilon = 1e-12);
        assert_abs_diff_eq!(plus0.hi, 3.5, epsilon = 1e-12);
    }

    #[test]
    fn rough_laplacian_constants() {
        let (c2, c3) = weitzenboeck_constants(&EinsteinData::nearly_kahler());
        assert_abs_diff_eq!(c2, 8.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c3, 9.0, epsilon = 1e-12);
        let tau0 = -12.0 / 5.0_f64.sqrt();
        let g2 = EinsteinData::from_tau0(tau0).unwrap();
        let (c2, c3) = weitzenboeck_constants(&g2);
        assert_abs_diff_eq!(c2, 5.0 * tau0 * tau0 / 8.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c3, 3.0 * tau0 * tau0 / 4.0, epsilon = 1e-12);
    }

    #[test]
    fn betti_verdicts_track_thresholds() {
        let e = EinsteinData::nearly_kahler();
        let report = betti_conditions(
            ManifoldKind::NearlyKahler,
            &BettiInputs::Spectral(SpectralMinima {
                hat_distinguished: -5.0,
                ring_traceless: None,
                ring_plus0: Some(-2.5),
                ring_minus: Some(-5.0),
            }),
            &e,
        )
        .unwrap();
        assert_eq!(report.b2, Verdict::Zero);
        assert_eq!(report.b3, Verdict::NoConclusion);
    }

    fn random_sym(rng: &mut ChaCha8Rng, n: usize) -> DenseTensor {
        let mut h = DenseTensor::zeros(n, 2).unwrap();
        for i in 0..n {
            for j in i..n {
                let v = rng.gen_range(-1.0..1.0);
                h.set(&[i, j], v);
                h.set(&[j, i], v);
            }
        }
        h
    }

    #[test]
    fn weyl_term_identities_hold_for_synthetic_weyl_tensors() {
        let su3 = crate::structure::SU3Model::standard().unwrap();
        let (_p1, _p6, p8) =
            crate::structure::two_form_subspaces_from_omega(su3.omega()).unwrap();
        let w6 = synthetic_weyl_in(&p8, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let split = sym2_split_with(su3.omega(), &random_sym(&mut rng, 6)).unwrap();
        let r2 = weyl_term_identity_2form(&w6, &split.plus0, su3.omega()).unwrap();
        assert!(r2 < 1e-10, "2-form identity residual {r2:e}");
        let report = weyl_term_identity_3form(&w6, &split.minus, &su3).unwrap();
        assert!(report.gamma_residual < 1e-10);
        assert!(report.hat_gamma_residual < 1e-10);
        assert!(report.trace_residual < 1e-10);

        let g2 = crate::structure::G2Model::standard().unwrap();
        let (_p7, p14) = crate::structure::g2_two_form_subspaces(g2.psi()).unwrap();
        let w7 = synthetic_weyl_in(&p14, 5).unwrap();
        let mut h = random_sym(&mut rng, 7);
        let tr: f64 = (0..7).map(|i| h.get(&[i, i])).sum();
        h.add_scaled(&metric_tensor(7).unwrap(), -tr / 7.0).unwrap();
        let report = weyl_term_identity_7d(&w7, &h, &g2).unwrap();
        assert!(report.gamma_residual < 1e-10);
        assert!(report.hat_gamma_residual < 1e-10);
        assert!(report.trace_residual < 1e-10);
    }

    #[test]
    fn weyl_term_identity_rejects_wrong_block() {
        let su3 = crate::structure::SU3Model::standard().unwrap();
        let (_p1, _p6, p8) =
            crate::structure::two_form_subspaces_from_omega(su3.omega()).unwrap();
        let w6 = synthetic_weyl_in(&p8, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let split = sym2_split_with(su3.omega(), &random_sym(&mut rng, 6)).unwrap();
        // anticommuting input handed to the commuting-block identity
        assert!(matches!(
            weyl_term_identity_2form(&w6, &split.minus, su3.omega()),
            Err(Error::Precondition(_))
        ));
        // a non-Weyl curvature tensor fails the Ricci gate
        let g = metric_tensor(6).unwrap();
        let r = kulkarni_nomizu(&g, &g).unwrap();
        assert!(matches!(
            weyl_term_identity_2form(&r, &split.plus0, su3.omega()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn betti_is_monotone_in_spectral_minima() {
        // raising a minimum can only move a verdict towards vanishing
        let e = EinsteinData::nearly_kahler();
        let mut previous_zero = false;
        for step in 0..40 {
            let hat = -10.0 + 0.25 * step as f64;
            let report = betti_conditions(
                ManifoldKind::NearlyKahler,
                &BettiInputs::Spectral(SpectralMinima {
                    hat_distinguished: hat,
                    ring_traceless: None,
                    ring_plus0: Some(-10.0),
                    ring_minus: Some(-10.0),
                }),
                &e,
            )
            .unwrap();
            let zero = report.b2 == Verdict::Zero;
            assert!(!previous_zero || zero);
            previous_zero = zero;
        }
    }
}
