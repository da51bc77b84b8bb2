//! Curvature operators on 2-forms and symmetric 2-tensors, represented as
//! symmetric matrices over explicit orthonormal bases.

use nalgebra::{DMatrix, DVector};

use crate::error::Error;
use crate::tensor::{form_inner, metric_tensor, CurvatureTensor, DenseTensor};
use crate::Result;

pub const LEAK_TOL: f64 = 1e-8;
pub const CLUSTER_TOL: f64 = 1e-6;
pub const SPECTRAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    /// Frame 2-forms `e_i ∧ e_j`, `i < j`.
    TwoForms,
    /// Orthonormalized symmetric products: `(e_i e_j + e_j e_i)/√2` for
    /// `i < j` and `e_i e_i` on the diagonal.
    Sym2,
}

#[derive(Debug, Clone)]
pub struct FormBasis {
    kind: BasisKind,
    dim: usize,
    elements: Vec<DenseTensor>,
}

impl FormBasis {
    pub fn two_forms(dim: usize) -> Result<Self> {
        let mut elements = Vec::new();
        for i in 0..dim {
            for j in i + 1..dim {
                let mut t = DenseTensor::zeros(dim, 2)?;
                t.set(&[i, j], 1.0);
                t.set(&[j, i], -1.0);
                elements.push(t);
            }
        }
        Ok(FormBasis {
            kind: BasisKind::TwoForms,
            dim,
            elements,
        })
    }

    pub fn sym2(dim: usize) -> Result<Self> {
        let mut elements = Vec::new();
        let inv_sqrt2 = 1.0 / 2.0_f64.sqrt();
        for i in 0..dim {
            for j in i..dim {
                let mut t = DenseTensor::zeros(dim, 2)?;
                if i == j {
                    t.set(&[i, i], 1.0);
                } else {
                    t.set(&[i, j], inv_sqrt2);
                    t.set(&[j, i], inv_sqrt2);
                }
                elements.push(t);
            }
        }
        Ok(FormBasis {
            kind: BasisKind::Sym2,
            dim,
            elements,
        })
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element(&self, idx: usize) -> &DenseTensor {
        &self.elements[idx]
    }

    /// Inner product matching the normalization of the basis: forms use the
    /// `1/k!` convention, symmetric tensors the plain Frobenius product.
    pub fn inner(&self, a: &DenseTensor, b: &DenseTensor) -> Result<f64> {
        match self.kind {
            BasisKind::TwoForms => form_inner(a, b),
            BasisKind::Sym2 => a.full_contract(b),
        }
    }

    /// Coefficient vector of `t` in this basis.
    pub fn coordinates(&self, t: &DenseTensor) -> Result<DVector<f64>> {
        let mut coords = DVector::zeros(self.len());
        for (idx, e) in self.elements.iter().enumerate() {
            coords[idx] = self.inner(t, e)?;
        }
        Ok(coords)
    }

    /// Tensor reconstructed from a coefficient vector.
    pub fn from_coordinates(&self, coords: &DVector<f64>) -> Result<DenseTensor> {
        if coords.len() != self.len() {
            return Err(Error::DimMismatch(coords.len(), self.len()));
        }
        let mut out = DenseTensor::zeros(self.dim, 2)?;
        for (idx, e) in self.elements.iter().enumerate() {
            out.add_scaled(e, coords[idx])?;
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SubspaceLabel {
    TwoFormsFull,
    TwoForms1,
    TwoForms6,
    TwoForms7,
    TwoForms8,
    TwoForms14,
    Sym2Full,
    Sym2Traceless,
    Sym2Plus0,
    Sym2Minus,
}

impl SubspaceLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            SubspaceLabel::TwoFormsFull => "omega2_full",
            SubspaceLabel::TwoForms1 => "omega2_1",
            SubspaceLabel::TwoForms6 => "omega2_6",
            SubspaceLabel::TwoForms7 => "omega2_7",
            SubspaceLabel::TwoForms8 => "omega2_8",
            SubspaceLabel::TwoForms14 => "omega2_14",
            SubspaceLabel::Sym2Full => "s2_full",
            SubspaceLabel::Sym2Traceless => "s2_0",
            SubspaceLabel::Sym2Plus0 => "s2_plus0",
            SubspaceLabel::Sym2Minus => "s2_minus",
        }
    }

    pub fn parse(s: &str) -> Option<SubspaceLabel> {
        Some(match s {
            "omega2_full" => SubspaceLabel::TwoFormsFull,
            "omega2_1" => SubspaceLabel::TwoForms1,
            "omega2_6" => SubspaceLabel::TwoForms6,
            "omega2_7" => SubspaceLabel::TwoForms7,
            "omega2_8" => SubspaceLabel::TwoForms8,
            "omega2_14" => SubspaceLabel::TwoForms14,
            "s2_full" => SubspaceLabel::Sym2Full,
            "s2_0" => SubspaceLabel::Sym2Traceless,
            "s2_plus0" => SubspaceLabel::Sym2Plus0,
            "s2_minus" => SubspaceLabel::Sym2Minus,
            _ => return None,
        })
    }
}

/// Orthonormal set of coefficient vectors spanning a subspace of the
/// ambient basis.
#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    pub label: SubspaceLabel,
    pub ambient: FormBasis,
    /// columns are orthonormal coefficient vectors
    pub vectors: DMatrix<f64>,
}

impl SubspaceBasis {
    pub fn new(label: SubspaceLabel, ambient: FormBasis, vectors: DMatrix<f64>) -> Result<Self> {
        if vectors.nrows() != ambient.len() {
            return Err(Error::DimMismatch(vectors.nrows(), ambient.len()));
        }
        let gram = vectors.transpose() * &vectors;
        let worst = (&gram - DMatrix::identity(gram.nrows(), gram.ncols()))
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        if worst > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "subspace basis is not orthonormal, gram residual {worst:e}"
            )));
        }
        Ok(SubspaceBasis {
            label,
            ambient,
            vectors,
        })
    }

    pub fn full(kind: BasisKind, dim: usize) -> Result<Self> {
        let (ambient, label) = match kind {
            BasisKind::TwoForms => (FormBasis::two_forms(dim)?, SubspaceLabel::TwoFormsFull),
            BasisKind::Sym2 => (FormBasis::sym2(dim)?, SubspaceLabel::Sym2Full),
        };
        let n = ambient.len();
        SubspaceBasis::new(label, ambient, DMatrix::identity(n, n))
    }

    pub fn subspace_dim(&self) -> usize {
        self.vectors.ncols()
    }
}

#[derive(Debug, Clone)]
pub enum OperatorBasis {
    Ambient(FormBasis),
    Subspace(SubspaceBasis),
}

impl OperatorBasis {
    pub fn len(&self) -> usize {
        match self {
            OperatorBasis::Ambient(b) => b.len(),
            OperatorBasis::Subspace(s) => s.subspace_dim(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Symmetric matrix of a self-adjoint operator in an explicit basis.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub basis: OperatorBasis,
    pub entries: DMatrix<f64>,
}

impl OperatorMatrix {
    fn check_symmetric(entries: &DMatrix<f64>) -> Result<()> {
        let worst = (entries - entries.transpose())
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        let scale = 1.0 + entries.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if worst > 1e-12 * scale {
            return Err(Error::OperatorNotSymmetric(worst));
        }
        Ok(())
    }

    pub fn new(basis: OperatorBasis, entries: DMatrix<f64>) -> Result<Self> {
        if entries.nrows() != basis.len() || entries.ncols() != basis.len() {
            return Err(Error::DimMismatch(entries.nrows(), basis.len()));
        }
        Self::check_symmetric(&entries)?;
        Ok(OperatorMatrix { basis, entries })
    }

    pub fn shifted(&self, shift: f64) -> OperatorMatrix {
        let n = self.entries.nrows();
        OperatorMatrix {
            basis: self.basis.clone(),
            entries: &self.entries + DMatrix::identity(n, n) * shift,
        }
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        let spec = spectrum(self, CLUSTER_TOL)?;
        spec.eigenvalues
            .first()
            .map(|c| c.value)
            .ok_or(Error::EigenFailure)
    }
}

/// Action of a curvature-like tensor on a 2-form: `(Âβ)_{ij} = A_{ijkl} β_{kl}`.
pub fn apply_two_form_action(a: &DenseTensor, beta: &DenseTensor) -> Result<DenseTensor> {
    if a.rank() != 4 || beta.rank() != 2 {
        return Err(Error::RankMismatch {
            expected: 4,
            got: a.rank(),
        });
    }
    if a.dim() != beta.dim() {
        return Err(Error::DimMismatch(a.dim(), beta.dim()));
    }
    let n = a.dim();
    DenseTensor::from_fn(n, 2, |idx| {
        let mut total = 0.0;
        for k in 0..n {
            for l in 0..n {
                total += a.get(&[idx[0], idx[1], k, l]) * beta.get(&[k, l]);
            }
        }
        total
    })
}

/// Action on symmetric 2-tensors: `(Åh)_{ij} = A_{kilj} h_{kl}`.
pub fn apply_sym2_action(a: &DenseTensor, h: &DenseTensor) -> Result<DenseTensor> {
    if a.rank() != 4 || h.rank() != 2 {
        return Err(Error::RankMismatch {
            expected: 4,
            got: a.rank(),
        });
    }
    if a.dim() != h.dim() {
        return Err(Error::DimMismatch(a.dim(), h.dim()));
    }
    let n = a.dim();
    DenseTensor::from_fn(n, 2, |idx| {
        let mut total = 0.0;
        for k in 0..n {
            for l in 0..n {
                total += a.get(&[k, idx[0], l, idx[1]]) * h.get(&[k, l]);
            }
        }
        total
    })
}

fn operator_in_basis(
    a: &DenseTensor,
    basis: FormBasis,
    apply: impl Fn(&DenseTensor, &DenseTensor) -> Result<DenseTensor>,
) -> Result<OperatorMatrix> {
    let m = basis.len();
    let mut entries = DMatrix::zeros(m, m);
    let images: Vec<DenseTensor> = (0..m)
        .map(|idx| apply(a, basis.element(idx)))
        .collect::<Result<_>>()?;
    for (col, image) in images.iter().enumerate() {
        for row in 0..m {
            entries[(row, col)] = basis.inner(image, basis.element(row))?;
        }
    }
    OperatorMatrix::new(OperatorBasis::Ambient(basis), entries)
}

/// Matrix of the 2-form action in the `e_i ∧ e_j` basis.
pub fn hat_matrix(r: &CurvatureTensor) -> Result<OperatorMatrix> {
    operator_in_basis(
        r.tensor(),
        FormBasis::two_forms(r.dim())?,
        apply_two_form_action,
    )
}

/// Matrix of the symmetric action in the orthonormalized `Sym2` basis.
pub fn ring_matrix(r: &CurvatureTensor) -> Result<OperatorMatrix> {
    operator_in_basis(r.tensor(), FormBasis::sym2(r.dim())?, apply_sym2_action)
}

/// Compress an operator onto an invariant subspace, rejecting the
/// restriction when the operator leaks out of it.
pub fn restrict(op: &OperatorMatrix, sub: &SubspaceBasis, leak_tol: f64) -> Result<OperatorMatrix> {
    let ambient = match &op.basis {
        OperatorBasis::Ambient(b) => b,
        OperatorBasis::Subspace(_) => {
            return Err(Error::InvalidParameter(
                "restriction requires an operator over the ambient basis".into(),
            ))
        }
    };
    if ambient.len() != sub.ambient.len() || ambient.kind() != sub.ambient.kind() {
        return Err(Error::DimMismatch(ambient.len(), sub.ambient.len()));
    }
    let v = &sub.vectors;
    let av = &op.entries * v;
    let compressed = v.transpose() * &av;
    let leak = (&av - v * &compressed)
        .iter()
        .fold(0.0f64, |m, e| m.max(e.abs()));
    if leak > leak_tol {
        return Err(Error::SubspaceLeak(leak, leak_tol));
    }
    OperatorMatrix::new(OperatorBasis::Subspace(sub.clone()), compressed)
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct EigenCluster {
    pub value: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<EigenCluster>,
    pub raw: Vec<f64>,
    pub eigenvectors: DMatrix<f64>,
    pub cluster_tol: f64,
    pub reconstruction_residual: f64,
}

/// Cyclic Jacobi diagonalization. The matrices here are small and often
/// have tightly clustered spectra, where one-sided QL solvers resolve the
/// eigenvectors poorly; Jacobi stays accurate to machine precision.
fn jacobi_eigen(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let mut a = m.clone();
    let mut v = DMatrix::identity(n, n);
    let scale = 1.0 + m.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                off = off.max(a[(p, q)].abs());
            }
        }
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    (a.diagonal(), v)
}

/// Eigenvalues of a symmetric operator matrix, grouped into clusters of
/// nearby values.
pub fn spectrum(op: &OperatorMatrix, cluster_tol: f64) -> Result<SpectrumReport> {
    OperatorMatrix::check_symmetric(&op.entries)?;
    let symmetrized = (&op.entries + op.entries.transpose()) * 0.5;
    let (values, eigenvectors) = jacobi_eigen(&symmetrized);
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let raw: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let mut vectors = DMatrix::zeros(symmetrized.nrows(), raw.len());
    for (col, &src) in order.iter().enumerate() {
        vectors.set_column(col, &eigenvectors.column(src));
    }

    let reconstructed = &vectors
        * DMatrix::from_diagonal(&DVector::from_vec(raw.clone()))
        * vectors.transpose();
    let scale = 1.0 + op.entries.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let residual = (&reconstructed - &symmetrized)
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    if residual > SPECTRAL_TOL * scale {
        return Err(Error::SpectralResidual(residual));
    }

    let mut clusters: Vec<EigenCluster> = Vec::new();
    let mut start = 0;
    while start < raw.len() {
        let mut end = start + 1;
        while end < raw.len() && (raw[end] - raw[end - 1]).abs() <= cluster_tol {
            end += 1;
        }
        let mean = raw[start..end].iter().sum::<f64>() / (end - start) as f64;
        clusters.push(EigenCluster {
            value: mean,
            multiplicity: end - start,
        });
        start = end;
    }

    Ok(SpectrumReport {
        eigenvalues: clusters,
        raw,
        eigenvectors: vectors,
        cluster_tol,
        reconstruction_residual: residual,
    })
}

impl SpectrumReport {
    /// Orthonormal eigenvector columns whose eigenvalue lies within `tol`
    /// of `value`.
    pub fn eigenspace(&self, value: f64, tol: f64) -> DMatrix<f64> {
        let cols: Vec<usize> = self
            .raw
            .iter()
            .enumerate()
            .filter(|(_, &v)| (v - value).abs() <= tol)
            .map(|(i, _)| i)
            .collect();
        let mut out = DMatrix::zeros(self.eigenvectors.nrows(), cols.len());
        for (dst, &src) in cols.iter().enumerate() {
            out.set_column(dst, &self.eigenvectors.column(src));
        }
        out
    }
}

/// Orthonormal basis of the orthogonal complement of a single unit vector,
/// built from the Householder reflection exchanging it with a coordinate
/// axis.
pub fn orthonormal_complement(unit: &DVector<f64>) -> Result<DMatrix<f64>> {
    let n = unit.len();
    let norm = unit.norm();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "complement requires a unit vector, norm {norm}"
        )));
    }
    let mut w = unit.clone();
    w[0] += if unit[0] >= 0.0 { 1.0 } else { -1.0 };
    let scale = 2.0 / w.norm_squared();
    // columns 1..n of H = I − scale · w wᵀ span the complement
    let mut out = DMatrix::zeros(n, n - 1);
    for col in 1..n {
        for row in 0..n {
            let h = if row == col { 1.0 } else { 0.0 } - scale * w[row] * w[col];
            out[(row, col - 1)] = h;
        }
    }
    Ok(out)
}

/// Coefficient vector of the frame metric in the `Sym2` basis, normalized
/// to unit length.
pub fn metric_unit_coordinates(dim: usize) -> Result<DVector<f64>> {
    let basis = FormBasis::sym2(dim)?;
    let g = metric_tensor(dim)?;
    let coords = basis.coordinates(&g)?;
    Ok(&coords / coords.norm())
}

/// Traceless symmetric tensors as a subspace of the `Sym2` basis.
pub fn sym2_traceless_subspace(dim: usize) -> Result<SubspaceBasis> {
    let g = metric_unit_coordinates(dim)?;
    let vectors = orthonormal_complement(&g)?;
    SubspaceBasis::new(SubspaceLabel::Sym2Traceless, FormBasis::sym2(dim)?, vectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::kulkarni_nomizu;
    use approx::assert_abs_diff_eq;

    fn metric_product(dim: usize) -> CurvatureTensor {
        let g = metric_tensor(dim).unwrap();
        kulkarni_nomizu(&g, &g).unwrap()
    }

    #[test]
    fn hat_matrix_of_metric_product_is_minus_four_identity() {
        let gg = metric_product(7);
        let hat = hat_matrix(&gg).unwrap();
        let expect = DMatrix::identity(21, 21) * -4.0;
        assert_eq!(hat.entries, expect);
    }

    #[test]
    fn ring_matrix_of_metric_product_on_traceless_part_is_two_identity() {
        let gg = metric_product(6);
        let ring = ring_matrix(&gg).unwrap();
        let sub = sym2_traceless_subspace(6).unwrap();
        let restricted = restrict(&ring, &sub, LEAK_TOL).unwrap();
        let worst = (&restricted.entries - DMatrix::identity(20, 20) * 2.0)
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(worst < 1e-12, "residual {worst}");
    }

    #[test]
    fn ring_matrix_sends_metric_to_dimension_scaled_metric() {
        // (g ⊛ g) acts on the metric direction by 2(1−n)
        let n = 5;
        let gg = metric_product(n);
        let ring = ring_matrix(&gg).unwrap();
        let g = metric_unit_coordinates(n).unwrap();
        let image = &ring.entries * &g;
        let expect = &g * (2.0 * (1.0 - n as f64));
        assert!((image - expect).norm() < 1e-12);
    }

    #[test]
    fn spectrum_clusters_repeated_eigenvalues() {
        let gg = metric_product(4);
        let hat = hat_matrix(&gg).unwrap();
        let spec = spectrum(&hat, CLUSTER_TOL).unwrap();
        assert_eq!(spec.eigenvalues.len(), 1);
        assert_abs_diff_eq!(spec.eigenvalues[0].value, -4.0, epsilon = 1e-12);
        assert_eq!(spec.eigenvalues[0].multiplicity, 6);
    }

    #[test]
    fn restrict_rejects_leaky_subspaces() {
        // an operator with distinct eigenvalues leaks out of a mixed span
        let g = metric_tensor(3).unwrap();
        let mut s = g.clone();
        s.set(&[0, 0], 5.0);
        let r = kulkarni_nomizu(&s, &g).unwrap();
        let hat = hat_matrix(&r).unwrap();
        let mut v = DMatrix::zeros(3, 1);
        v[(0, 0)] = (0.5f64).sqrt();
        v[(2, 0)] = (0.5f64).sqrt();
        let sub = SubspaceBasis::new(
            SubspaceLabel::TwoFormsFull,
            FormBasis::two_forms(3).unwrap(),
            v,
        )
        .unwrap();
        assert!(matches!(
            restrict(&hat, &sub, LEAK_TOL),
            Err(Error::SubspaceLeak(_, _))
        ));
    }

    #[test]
    fn complement_of_metric_direction_is_orthonormal() {
        let g = metric_unit_coordinates(7).unwrap();
        let comp = orthonormal_complement(&g).unwrap();
        assert_eq!(comp.ncols(), 27);
        let gram = comp.transpose() * &comp;
        let worst = (&gram - DMatrix::identity(27, 27))
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(worst < 1e-12);
        assert!((comp.transpose() * &g).norm() < 1e-12);
    }
}
