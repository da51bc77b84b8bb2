//! Dense tensor algebra in an orthonormal frame.
//!
//! All tensors carry their components in a flat row-major buffer over a
//! frame `e_1 .. e_n` with the Euclidean metric, so raised and lowered
//! indices coincide. Forms use the convention without factorial constants:
//! for 1-forms, `a ∧ b = a ⊗ b − b ⊗ a`, and the inner product of
//! k-forms carries a `1/k!`.

use crate::error::Error;
use crate::Result;

pub const MAX_DIM: usize = 8;

/// Dense, real-valued tensor of a fixed rank over a frame of dimension `dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    dim: usize,
    rank: usize,
    components: Vec<f64>,
}

impl DenseTensor {
    pub fn zeros(dim: usize, rank: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM || rank > MAX_DIM {
            return Err(Error::UnsupportedShape { dim, rank });
        }
        let len = dim.pow(rank as u32);
        Ok(DenseTensor {
            dim,
            rank,
            components: vec![0.0; len],
        })
    }

    pub fn from_fn(dim: usize, rank: usize, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let mut t = Self::zeros(dim, rank)?;
        let mut idx = vec![0usize; rank];
        for lin in 0..t.components.len() {
            t.unflatten(lin, &mut idx);
            t.components[lin] = f(&idx);
        }
        Ok(t)
    }

    pub fn scalar(dim: usize, value: f64) -> Result<Self> {
        let mut t = Self::zeros(dim, 0)?;
        t.components[0] = value;
        Ok(t)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    fn flatten(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank);
        idx.iter().fold(0, |acc, &i| {
            debug_assert!(i < self.dim);
            acc * self.dim + i
        })
    }

    fn unflatten(&self, mut lin: usize, idx: &mut [usize]) {
        for slot in idx.iter_mut().rev() {
            *slot = lin % self.dim;
            lin /= self.dim;
        }
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.components[self.flatten(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: f64) {
        let lin = self.flatten(idx);
        self.components[lin] = value;
    }

    pub fn add_scaled(&mut self, other: &DenseTensor, factor: f64) -> Result<()> {
        self.check_shape(other)?;
        for (a, b) in self.components.iter_mut().zip(&other.components) {
            *a += factor * b;
        }
        Ok(())
    }

    pub fn scale(&self, factor: f64) -> DenseTensor {
        let mut out = self.clone();
        for c in &mut out.components {
            *c *= factor;
        }
        out
    }

    pub fn sub(&self, other: &DenseTensor) -> Result<DenseTensor> {
        let mut out = self.clone();
        out.add_scaled(other, -1.0)?;
        Ok(out)
    }

    pub fn add(&self, other: &DenseTensor) -> Result<DenseTensor> {
        let mut out = self.clone();
        out.add_scaled(other, 1.0)?;
        Ok(out)
    }

    pub fn max_abs(&self) -> f64 {
        self.components.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Frobenius inner product (plain sum over all index tuples).
    pub fn full_contract(&self, other: &DenseTensor) -> Result<f64> {
        self.check_shape(other)?;
        Ok(self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a * b)
            .sum())
    }

    fn check_shape(&self, other: &DenseTensor) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch(self.dim, other.dim));
        }
        if self.rank != other.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                got: other.rank,
            });
        }
        Ok(())
    }

    /// Largest deviation from full antisymmetry, measured on adjacent
    /// index transpositions (which generate all of them).
    pub fn antisymmetry_residual(&self) -> f64 {
        if self.rank < 2 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        let mut idx = vec![0usize; self.rank];
        let mut swapped = vec![0usize; self.rank];
        for lin in 0..self.components.len() {
            self.unflatten(lin, &mut idx);
            for pos in 0..self.rank - 1 {
                swapped.copy_from_slice(&idx);
                swapped.swap(pos, pos + 1);
                let r = (self.components[lin] + self.get(&swapped)).abs();
                worst = worst.max(r);
            }
        }
        worst
    }

    /// Largest deviation from symmetry in the two indices of a rank-2 tensor.
    pub fn symmetry_residual_rank2(&self) -> f64 {
        debug_assert_eq!(self.rank, 2);
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                worst = worst.max((self.get(&[i, j]) - self.get(&[j, i])).abs());
            }
        }
        worst
    }
}

/// Sign of the permutation sending `0..n` to `perm`; `0` on repeats.
pub fn permutation_sign(perm: &[usize]) -> i32 {
    let mut sign = 1i32;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] == perm[j] {
                return 0;
            }
            if perm[i] > perm[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// Visit all strictly increasing index tuples of length `rank` in `0..dim`.
pub fn for_each_increasing(dim: usize, rank: usize, mut f: impl FnMut(&[usize])) {
    if rank == 0 {
        f(&[]);
        return;
    }
    if rank > dim {
        return;
    }
    let mut idx: Vec<usize> = (0..rank).collect();
    loop {
        f(&idx);
        // advance to the next increasing tuple
        let mut pos = rank;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            if idx[pos] < dim - (rank - pos) {
                idx[pos] += 1;
                for q in pos + 1..rank {
                    idx[q] = idx[q - 1] + 1;
                }
                break;
            }
        }
    }
}

fn visit_permutations(base: &[usize], f: &mut impl FnMut(&[usize], i32)) {
    // Heap's algorithm with incremental sign tracking.
    let mut work = base.to_vec();
    let n = work.len();
    if n == 0 {
        f(&work, 1);
        return;
    }
    let mut c = vec![0usize; n];
    let mut sign = 1i32;
    f(&work, sign);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                work.swap(0, i);
            } else {
                work.swap(c[i], i);
            }
            sign = -sign;
            f(&work, sign);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Build a fully antisymmetric tensor from its values on strictly
/// increasing index tuples.
pub fn fill_antisymmetric(
    dim: usize,
    rank: usize,
    mut value: impl FnMut(&[usize]) -> f64,
) -> Result<DenseTensor> {
    let mut t = DenseTensor::zeros(dim, rank)?;
    for_each_increasing(dim, rank, |inc| {
        let v = value(inc);
        if v != 0.0 {
            visit_permutations(inc, &mut |perm, sign| {
                t.set(perm, sign as f64 * v);
            });
        }
    });
    Ok(t)
}

fn check_form(t: &DenseTensor) -> Result<()> {
    let r = t.antisymmetry_residual();
    if r > 1e-12 * (1.0 + t.max_abs()) {
        return Err(Error::NotAntisymmetric(r));
    }
    Ok(())
}

/// Wedge product without factorial constants: on 1-forms,
/// `a ∧ b = a ⊗ b − b ⊗ a`.
pub fn wedge(a: &DenseTensor, b: &DenseTensor) -> Result<DenseTensor> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch(a.dim(), b.dim()));
    }
    check_form(a)?;
    check_form(b)?;
    let (k, l) = (a.rank(), b.rank());
    let dim = a.dim();
    if k + l > dim {
        return Err(Error::WedgeOverflow { k, l, dim });
    }
    if k == 0 {
        return Ok(b.scale(a.components()[0]));
    }
    if l == 0 {
        return Ok(a.scale(b.components()[0]));
    }
    // positions of the first factor: every k-subset of 0..k+l is a shuffle
    let mut splits: Vec<(Vec<usize>, Vec<usize>, f64)> = Vec::new();
    for_each_increasing(k + l, k, |first| {
        let rest: Vec<usize> = (0..k + l).filter(|p| !first.contains(p)).collect();
        // inversions between the two sorted blocks give the shuffle sign
        let mut inv = 0usize;
        for (slot, &p) in first.iter().enumerate() {
            inv += p - slot;
        }
        let sign = if inv % 2 == 0 { 1.0 } else { -1.0 };
        splits.push((first.to_vec(), rest, sign));
    });
    let mut ia = vec![0usize; k];
    let mut ib = vec![0usize; l];
    fill_antisymmetric(dim, k + l, |idx| {
        let mut total = 0.0;
        for (first, rest, sign) in &splits {
            for (s, &p) in first.iter().enumerate() {
                ia[s] = idx[p];
            }
            for (s, &p) in rest.iter().enumerate() {
                ib[s] = idx[p];
            }
            total += sign * a.get(&ia) * b.get(&ib);
        }
        total
    })
}

/// Inner product of k-forms, `(1/k!) a_{i..} b_{i..}`.
pub fn form_inner(a: &DenseTensor, b: &DenseTensor) -> Result<f64> {
    let mut fact = 1.0;
    for m in 1..=a.rank() {
        fact *= m as f64;
    }
    Ok(a.full_contract(b)? / fact)
}

/// Hodge star with `⋆1 = e^{1..n}`; `orientation` flips the volume form.
pub fn hodge_star(a: &DenseTensor, orientation: i32) -> Result<DenseTensor> {
    check_form(a)?;
    if orientation != 1 && orientation != -1 {
        return Err(Error::InvalidParameter(
            "orientation must be +1 or -1".into(),
        ));
    }
    let dim = a.dim();
    let k = a.rank();
    if k > dim {
        return Err(Error::UnsupportedShape { dim, rank: k });
    }
    let mut concat = vec![0usize; dim];
    fill_antisymmetric(dim, dim - k, |j_idx| {
        let comp: Vec<usize> = (0..dim).filter(|i| !j_idx.contains(i)).collect();
        concat[..k].copy_from_slice(&comp);
        concat[k..].copy_from_slice(j_idx);
        let eps = permutation_sign(&concat);
        orientation as f64 * eps as f64 * a.get(&comp)
    })
}

/// The derivation-style action of a 2-tensor `h` on a covariant tensor:
/// each slot of `sigma` is contracted with `h` in turn.
pub fn diamond(h: &DenseTensor, sigma: &DenseTensor) -> Result<DenseTensor> {
    if h.rank() != 2 {
        return Err(Error::RankMismatch {
            expected: 2,
            got: h.rank(),
        });
    }
    if h.dim() != sigma.dim() {
        return Err(Error::DimMismatch(h.dim(), sigma.dim()));
    }
    let dim = sigma.dim();
    let k = sigma.rank();
    let mut out = DenseTensor::zeros(dim, k)?;
    let mut idx = vec![0usize; k];
    let mut probe = vec![0usize; k];
    for lin in 0..out.components().len() {
        out.unflatten(lin, &mut idx);
        let mut total = 0.0;
        for slot in 0..k {
            probe.copy_from_slice(&idx);
            for p in 0..dim {
                probe[slot] = p;
                total += h.get(&[idx[slot], p]) * sigma.get(&probe);
            }
        }
        out.set(&idx, total);
    }
    Ok(out)
}

pub const CURVATURE_SYM_TOL: f64 = 1e-10;

/// Rank-4 tensor with the pair symmetries and first Bianchi identity of a
/// curvature tensor, validated on construction.
#[derive(Debug, Clone)]
pub struct CurvatureTensor {
    tensor: DenseTensor,
    symmetry_residual: f64,
}

impl CurvatureTensor {
    pub fn new(tensor: DenseTensor, tol: f64) -> Result<Self> {
        if tensor.rank() != 4 {
            return Err(Error::RankMismatch {
                expected: 4,
                got: tensor.rank(),
            });
        }
        let residual = curvature_symmetry_residual(&tensor);
        if residual > tol {
            return Err(Error::SymmetryViolation(residual));
        }
        Ok(CurvatureTensor {
            tensor,
            symmetry_residual: residual,
        })
    }

    pub fn tensor(&self) -> &DenseTensor {
        &self.tensor
    }

    pub fn dim(&self) -> usize {
        self.tensor.dim()
    }

    pub fn symmetry_residual(&self) -> f64 {
        self.symmetry_residual
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.tensor.get(&[i, j, k, l])
    }
}

/// Worst violation among antisymmetry in each index pair, pair exchange,
/// and the first Bianchi identity.
pub fn curvature_symmetry_residual(t: &DenseTensor) -> f64 {
    let n = t.dim();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let a = t.get(&[i, j, k, l]);
                    worst = worst.max((a + t.get(&[j, i, k, l])).abs());
                    worst = worst.max((a + t.get(&[i, j, l, k])).abs());
                    worst = worst.max((a - t.get(&[k, l, i, j])).abs());
                    let bianchi = a + t.get(&[k, i, j, l]) + t.get(&[j, k, i, l]);
                    worst = worst.max(bianchi.abs());
                }
            }
        }
    }
    worst
}

/// Kulkarni–Nomizu product of two symmetric 2-tensors.
pub fn kulkarni_nomizu(s: &DenseTensor, t: &DenseTensor) -> Result<CurvatureTensor> {
    for part in [s, t] {
        if part.rank() != 2 {
            return Err(Error::RankMismatch {
                expected: 2,
                got: part.rank(),
            });
        }
        let r = part.symmetry_residual_rank2();
        if r > 1e-12 * (1.0 + part.max_abs()) {
            return Err(Error::NotSymmetric(r));
        }
    }
    if s.dim() != t.dim() {
        return Err(Error::DimMismatch(s.dim(), t.dim()));
    }
    let n = s.dim();
    let raw = DenseTensor::from_fn(n, 4, |idx| {
        let (i, j, k, l) = (idx[0], idx[1], idx[2], idx[3]);
        s.get(&[i, l]) * t.get(&[j, k]) + s.get(&[j, k]) * t.get(&[i, l])
            - s.get(&[i, k]) * t.get(&[j, l])
            - s.get(&[j, l]) * t.get(&[i, k])
    })?;
    let scale = 1.0 + raw.max_abs();
    CurvatureTensor::new(raw, CURVATURE_SYM_TOL * scale)
}

/// Identity matrix of the frame metric as a rank-2 tensor.
pub fn metric_tensor(dim: usize) -> Result<DenseTensor> {
    DenseTensor::from_fn(dim, 2, |idx| if idx[0] == idx[1] { 1.0 } else { 0.0 })
}

/// Ricci contraction `ric_{ij} = R_{kijk}` summed over `k`.
pub fn ricci(r: &CurvatureTensor) -> Result<DenseTensor> {
    let n = r.dim();
    DenseTensor::from_fn(n, 2, |idx| {
        (0..n).map(|k| r.get(k, idx[0], idx[1], k)).sum()
    })
}

#[derive(Debug, Clone)]
pub struct RiemannDecomposition {
    pub ricci: DenseTensor,
    pub scalar: f64,
    pub scalar_part: CurvatureTensor,
    pub traceless_ricci_part: CurvatureTensor,
    pub weyl: CurvatureTensor,
}

/// Orthogonal splitting of a curvature tensor into scalar, traceless
/// Ricci and Weyl pieces.
pub fn riemann_decompose(r: &CurvatureTensor) -> Result<RiemannDecomposition> {
    let n = r.dim();
    if n < 3 {
        return Err(Error::InvalidParameter(
            "curvature decomposition needs dimension at least 3".into(),
        ));
    }
    let nf = n as f64;
    let ric = ricci(r)?;
    let scalar: f64 = (0..n).map(|i| ric.get(&[i, i])).sum();
    let g = metric_tensor(n)?;
    let mut ric0 = ric.clone();
    ric0.add_scaled(&g, -scalar / nf)?;

    let s_part = kulkarni_nomizu(&g, &g)?
        .tensor()
        .scale(scalar / (2.0 * nf * (nf - 1.0)));
    let e_part = kulkarni_nomizu(&ric0, &g)?
        .tensor()
        .scale(1.0 / (nf - 2.0));
    let mut w = r.tensor().clone();
    w.add_scaled(&s_part, -1.0)?;
    w.add_scaled(&e_part, -1.0)?;

    let tol = CURVATURE_SYM_TOL * (1.0 + r.tensor().max_abs());
    Ok(RiemannDecomposition {
        ricci: ric,
        scalar,
        scalar_part: CurvatureTensor::new(s_part, tol)?,
        traceless_ricci_part: CurvatureTensor::new(e_part, tol)?,
        weyl: CurvatureTensor::new(w, tol)?,
    })
}

/// Sectional value `R(X,Y,Y,X) / |X ∧ Y|²` of a curvature tensor on the
/// plane spanned by two frame vectors.
pub fn sectional(r: &CurvatureTensor, x: &[f64], y: &[f64]) -> Result<f64> {
    let n = r.dim();
    if x.len() != n || y.len() != n {
        return Err(Error::DimMismatch(x.len().max(y.len()), n));
    }
    let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(p, q)| p * q).sum() };
    let gram = dot(x, x) * dot(y, y) - dot(x, y) * dot(x, y);
    if gram <= 1e-12 {
        return Err(Error::DegeneratePlane(gram));
    }
    let mut value = 0.0;
    for i in 0..n {
        if x[i] == 0.0 {
            continue;
        }
        for j in 0..n {
            if y[j] == 0.0 {
                continue;
            }
            for k in 0..n {
                for l in 0..n {
                    value += r.get(i, j, k, l) * x[i] * y[j] * y[k] * x[l];
                }
            }
        }
    }
    Ok(value / gram)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn one_form(dim: usize, slot: usize) -> DenseTensor {
        DenseTensor::from_fn(dim, 1, |idx| if idx[0] == slot { 1.0 } else { 0.0 }).unwrap()
    }

    #[test]
    fn wedge_of_one_forms_is_antisymmetrized_product() {
        let a = one_form(4, 0);
        let b = one_form(4, 2);
        let w = wedge(&a, &b).unwrap();
        assert_eq!(w.get(&[0, 2]), 1.0);
        assert_eq!(w.get(&[2, 0]), -1.0);
        assert_eq!(w.get(&[0, 1]), 0.0);
    }

    #[test]
    fn wedge_is_associative_on_frame_forms() {
        let (a, b, c) = (one_form(5, 1), one_form(5, 2), one_form(5, 4));
        let left = wedge(&wedge(&a, &b).unwrap(), &c).unwrap();
        let right = wedge(&a, &wedge(&b, &c).unwrap()).unwrap();
        assert_eq!(left.sub(&right).unwrap().max_abs(), 0.0);
        assert_eq!(left.get(&[1, 2, 4]), 1.0);
        assert_eq!(left.get(&[2, 1, 4]), -1.0);
    }

    #[test]
    fn wedge_rank_overflow_rejected() {
        let a = wedge(&one_form(3, 0), &one_form(3, 1)).unwrap();
        let b = wedge(&one_form(3, 1), &one_form(3, 2)).unwrap();
        assert!(matches!(
            wedge(&a, &b),
            Err(Error::WedgeOverflow { .. })
        ));
    }

    #[test]
    fn frame_two_forms_are_unit() {
        let w = wedge(&one_form(6, 1), &one_form(6, 3)).unwrap();
        assert_eq!(form_inner(&w, &w).unwrap(), 1.0);
    }

    #[test]
    fn hodge_star_of_one_is_volume() {
        let one = DenseTensor::scalar(4, 1.0).unwrap();
        let vol = hodge_star(&one, 1).unwrap();
        assert_eq!(vol.get(&[0, 1, 2, 3]), 1.0);
        assert_eq!(vol.get(&[1, 0, 2, 3]), -1.0);
    }

    #[test]
    fn hodge_star_squares_to_sign() {
        // Euclidean signature: ⋆⋆ = (−1)^{k(n−k)}
        let a = wedge(&one_form(5, 0), &one_form(5, 3)).unwrap();
        let twice = hodge_star(&hodge_star(&a, 1).unwrap(), 1).unwrap();
        let expect = a.scale(if (2 * 3) % 2 == 0 { 1.0 } else { -1.0 });
        assert_eq!(twice.sub(&expect).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn wedge_with_star_recovers_norm() {
        let mut a = wedge(&one_form(7, 0), &wedge(&one_form(7, 2), &one_form(7, 5)).unwrap())
            .unwrap()
            .scale(2.0);
        a.add_scaled(
            &wedge(&one_form(7, 1), &wedge(&one_form(7, 3), &one_form(7, 6)).unwrap()).unwrap(),
            -3.0,
        )
        .unwrap();
        let prod = wedge(&a, &hodge_star(&a, 1).unwrap()).unwrap();
        let norm2 = form_inner(&a, &a).unwrap();
        assert_abs_diff_eq!(norm2, 13.0, epsilon = 1e-12);
        assert_abs_diff_eq!(prod.get(&[0, 1, 2, 3, 4, 5, 6]), norm2, epsilon = 1e-12);
    }

    #[test]
    fn metric_products_have_expected_sectional_and_traces() {
        let g = metric_tensor(5).unwrap();
        let gg = kulkarni_nomizu(&g, &g).unwrap();
        assert_eq!(gg.symmetry_residual(), 0.0);
        let mut x = vec![0.0; 5];
        let mut y = vec![0.0; 5];
        x[0] = 1.0;
        y[3] = 1.0;
        assert_eq!(sectional(&gg, &x, &y).unwrap(), 2.0);
        let ric = ricci(&gg).unwrap();
        assert_eq!(ric.get(&[2, 2]), 2.0 * 4.0);
    }

    #[test]
    fn kulkarni_nomizu_rejects_asymmetric_input() {
        let mut s = metric_tensor(4).unwrap();
        s.set(&[0, 1], 0.5);
        assert!(matches!(
            kulkarni_nomizu(&s, &s),
            Err(Error::NotSymmetric(_))
        ));
    }

    #[test]
    fn decomposition_of_constant_curvature_has_no_weyl() {
        let g = metric_tensor(6).unwrap();
        let gg = kulkarni_nomizu(&g, &g).unwrap();
        let parts = riemann_decompose(&gg).unwrap();
        assert!(parts.weyl.tensor().max_abs() < 1e-12);
        assert!(parts.traceless_ricci_part.tensor().max_abs() < 1e-12);
        assert_abs_diff_eq!(parts.scalar, 2.0 * 6.0 * 5.0, epsilon = 1e-12);
    }

    #[test]
    fn diamond_with_metric_counts_slots() {
        let g = metric_tensor(6).unwrap();
        let sigma = wedge(&one_form(6, 0), &wedge(&one_form(6, 1), &one_form(6, 2)).unwrap())
            .unwrap();
        let out = diamond(&g, &sigma).unwrap();
        assert_eq!(out.sub(&sigma.scale(3.0)).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn sectional_rejects_degenerate_planes() {
        let g = metric_tensor(4).unwrap();
        let gg = kulkarni_nomizu(&g, &g).unwrap();
        let x = vec![1.0, 0.0, 0.0, 0.0];
        assert!(matches!(
            sectional(&gg, &x, &x),
            Err(Error::DegeneratePlane(_))
        ));
    }
}
