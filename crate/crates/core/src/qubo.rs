//! Binary quadratic models: `f(x) = a + bᵀx + xᵀQx` over `x ∈ {0,1}ⁿ`.
//!
//! `Q` is stored densely in general form. It is not required to be symmetric or
//! triangular; [`QuboModel::to_symmetric`] and [`QuboModel::to_upper_triangular`]
//! produce the canonical views, and [`QuboModel::absorb_linear`] folds `b` onto
//! the diagonal using `xᵢ² = xᵢ`. All four views share one energy function.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::QuboError;
use crate::scalar::Scalar;

/// An assignment of the binary variables.
///
/// Assignments are also identified with integers: bit `i` of the integer is
/// `xᵢ`, so `x₀` is the least significant bit. Every tie-break in the solvers
/// prefers the smallest such integer.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct BinaryVector(Vec<u8>);

impl BinaryVector {
    pub fn new(bits: Vec<u8>) -> Result<Self, QuboError> {
        if let Some((index, &value)) = bits.iter().enumerate().find(|(_, &b)| b > 1) {
            return Err(QuboError::InvalidBit {
                index,
                value: value as i64,
            });
        }
        Ok(Self(bits))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn ones(n: usize) -> Self {
        Self(vec![1; n])
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        Self(bits.iter().map(|&b| b as u8).collect())
    }

    /// Assignment whose integer value is `index`. Requires `n <= 64`.
    pub fn from_index(index: u64, n: usize) -> Self {
        assert!(n <= 64, "integer identification needs n <= 64");
        Self((0..n).map(|i| ((index >> i) & 1) as u8).collect())
    }

    pub fn to_index(&self) -> u64 {
        assert!(self.0.len() <= 64, "integer identification needs n <= 64");
        self.0
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &b)| acc | ((b as u64) << i))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b == 1).count()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i] == 1
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    /// Indices of the variables set to one.
    pub fn ones_indices(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| (b == 1).then_some(i))
            .collect()
    }
}

impl TryFrom<Vec<u8>> for BinaryVector {
    type Error = QuboError;

    fn try_from(bits: Vec<u8>) -> Result<Self, Self::Error> {
        Self::new(bits)
    }
}

impl From<BinaryVector> for Vec<u8> {
    fn from(v: BinaryVector) -> Self {
        v.0
    }
}

/// An assignment of spin variables `sᵢ ∈ {−1, +1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct SpinVector(Vec<i8>);

impl SpinVector {
    pub fn new(spins: Vec<i8>) -> Result<Self, QuboError> {
        if let Some((index, &value)) = spins
            .iter()
            .enumerate()
            .find(|(_, &s)| s != 1 && s != -1)
        {
            return Err(QuboError::InvalidSpin {
                index,
                value: value as i64,
            });
        }
        Ok(Self(spins))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }
}

impl TryFrom<Vec<i8>> for SpinVector {
    type Error = QuboError;

    fn try_from(spins: Vec<i8>) -> Result<Self, Self::Error> {
        Self::new(spins)
    }
}

impl From<SpinVector> for Vec<i8> {
    fn from(v: SpinVector) -> Self {
        v.0
    }
}

/// `sᵢ = 2xᵢ − 1`.
pub fn binary_to_spin(x: &BinaryVector) -> SpinVector {
    SpinVector(x.0.iter().map(|&b| 2 * b as i8 - 1).collect())
}

/// `xᵢ = (sᵢ + 1) / 2`.
pub fn spin_to_binary(s: &SpinVector) -> BinaryVector {
    BinaryVector(s.0.iter().map(|&v| ((v + 1) / 2) as u8).collect())
}

/// Dense QUBO model with constant offset, linear vector and general quadratic matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "QuboDocument<T>",
    into = "QuboDocument<T>",
    bound(
        serialize = "T: Scalar + Serialize",
        deserialize = "T: Scalar + Deserialize<'de>"
    )
)]
pub struct QuboModel<T> {
    n: usize,
    offset: T,
    linear: Vec<T>,
    /// Row-major `n × n`.
    quadratic: Vec<T>,
}

/// On-disk layout: `quadratic` is an array of rows.
#[derive(Serialize, Deserialize)]
struct QuboDocument<T> {
    n: usize,
    offset: T,
    linear: Vec<T>,
    quadratic: Vec<Vec<T>>,
}

impl<T: Scalar> TryFrom<QuboDocument<T>> for QuboModel<T> {
    type Error = QuboError;

    fn try_from(doc: QuboDocument<T>) -> Result<Self, Self::Error> {
        if doc.linear.len() != doc.n {
            return Err(QuboError::DimensionMismatch {
                what: "linear",
                expected: doc.n,
                found: doc.linear.len(),
            });
        }
        QuboModel::new(doc.offset, doc.linear, doc.quadratic)
    }
}

impl<T: Scalar> From<QuboModel<T>> for QuboDocument<T> {
    fn from(m: QuboModel<T>) -> Self {
        let quadratic = m.quadratic.chunks(m.n).map(<[T]>::to_vec).collect();
        QuboDocument {
            n: m.n,
            offset: m.offset,
            linear: m.linear,
            quadratic,
        }
    }
}

impl QuboModel<f64> {
    /// Zero offset, linear terms and every matrix entry drawn uniformly from
    /// `[−bound, bound]`, reproducible from `seed`.
    pub fn random(n: usize, bound: f64, seed: u64) -> Result<Self, QuboError> {
        if !(bound.is_finite() && bound >= 0.0) {
            return Err(QuboError::NonFinite("bound"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = move || if bound == 0.0 { 0.0 } else { rng.gen_range(-bound..=bound) };
        let linear = (0..n).map(|_| draw()).collect();
        let quadratic = (0..n * n).map(|_| draw()).collect();
        Self::from_flat(0.0, linear, quadratic)
    }
}

impl<T: Scalar> QuboModel<T> {
    /// Builds a model from `a`, `b` and the rows of `Q`.
    pub fn new(offset: T, linear: Vec<T>, quadratic: Vec<Vec<T>>) -> Result<Self, QuboError> {
        let n = linear.len();
        if quadratic.len() != n {
            return Err(QuboError::DimensionMismatch {
                what: "quadratic rows",
                expected: n,
                found: quadratic.len(),
            });
        }
        let mut flat = Vec::with_capacity(n * n);
        for row in &quadratic {
            if row.len() != n {
                return Err(QuboError::DimensionMismatch {
                    what: "quadratic columns",
                    expected: n,
                    found: row.len(),
                });
            }
            flat.extend_from_slice(row);
        }
        Self::from_flat(offset, linear, flat)
    }

    pub(crate) fn from_flat(offset: T, linear: Vec<T>, quadratic: Vec<T>) -> Result<Self, QuboError> {
        let n = linear.len();
        if n == 0 {
            return Err(QuboError::Empty);
        }
        if quadratic.len() != n * n {
            return Err(QuboError::DimensionMismatch {
                what: "quadratic entries",
                expected: n * n,
                found: quadratic.len(),
            });
        }
        if !offset.is_finite_value() {
            return Err(QuboError::NonFinite("offset"));
        }
        if !linear.iter().all(Scalar::is_finite_value) {
            return Err(QuboError::NonFinite("linear"));
        }
        if !quadratic.iter().all(Scalar::is_finite_value) {
            return Err(QuboError::NonFinite("quadratic"));
        }
        Ok(Self {
            n,
            offset,
            linear,
            quadratic,
        })
    }

    /// The all-zero model on `n` variables.
    pub fn zeros(n: usize) -> Result<Self, QuboError> {
        Self::from_flat(T::zero(), vec![T::zero(); n], vec![T::zero(); n * n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn offset(&self) -> T {
        self.offset
    }

    pub fn linear(&self) -> &[T] {
        &self.linear
    }

    /// Entry `q_ij` of the stored (general form) matrix.
    pub fn q(&self, i: usize, j: usize) -> T {
        self.quadratic[i * self.n + j]
    }

    pub fn quadratic_row(&self, i: usize) -> &[T] {
        &self.quadratic[i * self.n..(i + 1) * self.n]
    }

    pub fn quadratic_rows(&self) -> Vec<Vec<T>> {
        self.quadratic.chunks(self.n).map(<[T]>::to_vec).collect()
    }

    /// Effective coefficient of `xᵢxⱼ` for `i ≠ j`: `q_ij + q_ji`.
    pub fn pair_coefficient(&self, i: usize, j: usize) -> T {
        self.q(i, j) + self.q(j, i)
    }

    /// Effective coefficient of `xᵢ` alone: `b_i + q_ii`.
    pub fn diagonal_coefficient(&self, i: usize) -> T {
        self.linear[i] + self.q(i, i)
    }

    /// `f(x) = a + Σ bᵢxᵢ + Σᵢⱼ qᵢⱼxᵢxⱼ` over the full double sum.
    pub fn energy(&self, x: &BinaryVector) -> Result<T, QuboError> {
        self.check_len(x.len())?;
        Ok(self.energy_bits(x.as_slice()))
    }

    pub(crate) fn energy_bits(&self, bits: &[u8]) -> T {
        let mut total = self.offset;
        for i in (0..self.n).filter(|&i| bits[i] == 1) {
            total = total + self.linear[i];
            let row = self.quadratic_row(i);
            for j in (0..self.n).filter(|&j| bits[j] == 1) {
                total = total + row[j];
            }
        }
        total
    }

    /// Energy change from flipping bit `i`, computed from row and column `i` only.
    pub fn flip_delta(&self, x: &BinaryVector, i: usize) -> Result<T, QuboError> {
        self.check_len(x.len())?;
        if i >= self.n {
            return Err(QuboError::IndexOutOfRange { index: i, n: self.n });
        }
        let bits = x.as_slice();
        let mut field = self.diagonal_coefficient(i);
        for j in (0..self.n).filter(|&j| j != i && bits[j] == 1) {
            field = field + self.pair_coefficient(i, j);
        }
        Ok(if bits[i] == 1 { -field } else { field })
    }

    /// `Q' = Q + Diag(b)` with `b` zeroed; offset unchanged.
    pub fn absorb_linear(&self) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            out.quadratic[i * self.n + i] = self.q(i, i) + self.linear[i];
            out.linear[i] = T::zero();
        }
        out
    }

    /// Symmetric view: off-diagonal entries become `(q_ij + q_ji) / 2`.
    pub fn to_symmetric(&self) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let v = self.pair_coefficient(i, j).half();
                out.quadratic[i * self.n + j] = v;
                out.quadratic[j * self.n + i] = v;
            }
        }
        out
    }

    /// Upper-triangular view: `q_ij + q_ji` above the diagonal, zeros below.
    pub fn to_upper_triangular(&self) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                out.quadratic[i * self.n + j] = self.pair_coefficient(i, j);
                out.quadratic[j * self.n + i] = T::zero();
            }
        }
        out
    }

    pub fn with_offset(&self, offset: T) -> Result<Self, QuboError> {
        if !offset.is_finite_value() {
            return Err(QuboError::NonFinite("offset"));
        }
        let mut out = self.clone();
        out.offset = offset;
        Ok(out)
    }

    /// Σ|bᵢ| + Σ|qᵢⱼ| over the stored coefficients.
    pub fn coefficient_abs_sum(&self) -> T {
        self.linear
            .iter()
            .chain(self.quadratic.iter())
            .fold(T::zero(), |acc, v| acc + v.abs())
    }

    /// Σ|bᵢ + qᵢᵢ| + Σ_{i<j}|qᵢⱼ + qⱼᵢ|: a bound on the energy swing that is the
    /// same for every canonical view of the model.
    pub fn energy_scale(&self) -> T {
        let mut total = T::zero();
        for i in 0..self.n {
            total = total + self.diagonal_coefficient(i).abs();
            for j in (i + 1)..self.n {
                total = total + self.pair_coefficient(i, j).abs();
            }
        }
        total
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> Result<QuboModel<U>, QuboError> {
        QuboModel::from_flat(
            f(self.offset),
            self.linear.iter().map(|&v| f(v)).collect(),
            self.quadratic.iter().map(|&v| f(v)).collect(),
        )
    }

    pub(crate) fn add_to_offset(&mut self, v: T) {
        self.offset = self.offset + v;
    }

    pub(crate) fn add_to_linear(&mut self, i: usize, v: T) {
        self.linear[i] = self.linear[i] + v;
    }

    pub(crate) fn add_to_quadratic(&mut self, i: usize, j: usize, v: T) {
        let k = i * self.n + j;
        self.quadratic[k] = self.quadratic[k] + v;
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<(), QuboError> {
        if len != self.n {
            return Err(QuboError::DimensionMismatch {
                what: "assignment",
                expected: self.n,
                found: len,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;
    use proptest::prelude::*;

    fn m(offset: f64, linear: Vec<f64>, quadratic: Vec<Vec<f64>>) -> QuboModel<f64> {
        QuboModel::new(offset, linear, quadratic).unwrap()
    }

    fn bits(v: &[u8]) -> BinaryVector {
        BinaryVector::new(v.to_vec()).unwrap()
    }

    /// Independent evaluation of a + bᵀx + xᵀQx through plain loops.
    fn oracle_energy(model: &QuboModel<f64>, x: &[u8]) -> f64 {
        let n = model.n();
        let xf: Vec<f64> = x.iter().map(|&b| b as f64).collect();
        let mut e = model.offset();
        for i in 0..n {
            e += model.linear()[i] * xf[i];
            for j in 0..n {
                e += model.q(i, j) * xf[i] * xf[j];
            }
        }
        e
    }

    #[test]
    fn constant_only_model() {
        let model = m(5.0, vec![0.0; 3], vec![vec![0.0; 3]; 3]);
        for idx in 0..8 {
            let x = BinaryVector::from_index(idx, 3);
            assert_eq!(model.energy(&x).unwrap(), 5.0);
        }
    }

    #[test]
    fn two_variable_expansion() {
        let model = m(0.0, vec![1.0, 2.0], vec![vec![0.0, 3.0], vec![0.0, 0.0]]);
        assert_eq!(model.energy(&bits(&[1, 1])).unwrap(), 6.0);
    }

    #[test]
    fn asymmetric_entries_both_count() {
        let model = m(0.0, vec![0.0, 0.0], vec![vec![0.0, 3.0], vec![1.0, 0.0]]);
        let x = bits(&[1, 1]);
        assert_eq!(oracle_energy(&model, x.as_slice()), 4.0);
        assert_eq!(model.energy(&x).unwrap(), 4.0);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let model = QuboModel::<f64>::zeros(3).unwrap();
        assert!(matches!(
            model.energy(&bits(&[1, 0])),
            Err(QuboError::DimensionMismatch { expected: 3, found: 2, .. })
        ));
        assert!(QuboModel::new(0.0, vec![0.0, 0.0], vec![vec![0.0; 2]]).is_err());
        assert!(QuboModel::new(0.0, vec![0.0], vec![vec![0.0, 1.0]]).is_err());
        assert_eq!(QuboModel::<f64>::zeros(0), Err(QuboError::Empty));
    }

    #[test]
    fn non_finite_entries_rejected() {
        assert_eq!(
            QuboModel::new(0.0, vec![f64::NAN], vec![vec![0.0]]),
            Err(QuboError::NonFinite("linear"))
        );
        assert_eq!(
            QuboModel::new(f64::INFINITY, vec![0.0], vec![vec![0.0]]),
            Err(QuboError::NonFinite("offset"))
        );
    }

    #[test]
    fn absorb_linear_embeds_diagonal() {
        let model = m(0.0, vec![1.0, 2.0], vec![vec![0.0; 2]; 2]);
        let absorbed = model.absorb_linear();
        assert_eq!(absorbed.linear(), &[0.0, 0.0]);
        assert_eq!(absorbed.quadratic_rows(), vec![vec![1.0, 0.0], vec![0.0, 2.0]]);

        let no_linear = m(1.5, vec![0.0, 0.0], vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        assert_eq!(no_linear.absorb_linear(), no_linear);
    }

    #[test]
    fn symmetric_and_triangular_views() {
        let model = m(0.0, vec![0.0, 0.0], vec![vec![0.5, 3.0], vec![1.0, -1.0]]);
        let s = model.to_symmetric();
        assert_eq!(s.q(0, 1), 2.0);
        assert_eq!(s.q(1, 0), 2.0);
        assert_eq!(s.q(0, 0), 0.5);
        let u = model.to_upper_triangular();
        assert_eq!(u.q(0, 1), 4.0);
        assert_eq!(u.q(1, 0), 0.0);
        assert_eq!(u.q(1, 1), -1.0);

        assert_eq!(s.to_symmetric(), s);
        assert_eq!(u.to_upper_triangular(), u);
    }

    #[test]
    fn spin_conversion_endpoints() {
        assert_eq!(binary_to_spin(&bits(&[0])).as_slice(), &[-1]);
        assert_eq!(binary_to_spin(&bits(&[1])).as_slice(), &[1]);
        let s = SpinVector::new(vec![-1, 1, 1]).unwrap();
        assert_eq!(spin_to_binary(&s), bits(&[0, 1, 1]));
        assert!(SpinVector::new(vec![0]).is_err());
        assert!(BinaryVector::new(vec![2]).is_err());
    }

    #[test]
    fn index_identification() {
        let x = BinaryVector::from_index(0b1011, 5);
        assert_eq!(x.as_slice(), &[1, 1, 0, 1, 0]);
        assert_eq!(x.to_index(), 0b1011);
        assert_eq!(x.ones_indices(), vec![0, 1, 3]);
    }

    #[test]
    fn exact_rational_views_agree() {
        let r = |a, b| Rational64::new(a, b);
        let model = QuboModel::new(
            r(1, 3),
            vec![r(1, 2), r(-2, 7)],
            vec![vec![r(1, 5), r(3, 11)], vec![r(-4, 9), r(2, 3)]],
        )
        .unwrap();
        for idx in 0..4 {
            let x = BinaryVector::from_index(idx, 2);
            let e = model.energy(&x).unwrap();
            assert_eq!(model.to_symmetric().energy(&x).unwrap(), e);
            assert_eq!(model.to_upper_triangular().energy(&x).unwrap(), e);
            assert_eq!(model.absorb_linear().energy(&x).unwrap(), e);
        }
    }

    #[test]
    fn serialization_layout() {
        let model = m(0.5, vec![1.0, 2.0], vec![vec![0.0, 3.0], vec![1.0, 0.0]]);
        let text = serde_json::to_string(&model).unwrap();
        assert_eq!(
            text,
            r#"{"n":2,"offset":0.5,"linear":[1.0,2.0],"quadratic":[[0.0,3.0],[1.0,0.0]]}"#
        );
        let back: QuboModel<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, model);
        let bad = r#"{"n":3,"offset":0.0,"linear":[1.0,2.0],"quadratic":[[0.0,3.0],[1.0,0.0]]}"#;
        assert!(serde_json::from_str::<QuboModel<f64>>(bad).is_err());
    }

    fn model_strategy(max_n: usize) -> impl Strategy<Value = QuboModel<f64>> {
        (1..=max_n).prop_flat_map(|n| {
            (
                -5.0..5.0f64,
                prop::collection::vec(-5.0..5.0f64, n),
                prop::collection::vec(-5.0..5.0f64, n * n),
            )
                .prop_map(|(a, b, q)| QuboModel::from_flat(a, b, q).unwrap())
        })
    }

    proptest! {
        #[test]
        fn energy_matches_matrix_oracle(model in model_strategy(7), seed in any::<u64>()) {
            let x = BinaryVector::from_index(seed % (1 << model.n()), model.n());
            let e = model.energy(&x).unwrap();
            prop_assert!((e - oracle_energy(&model, x.as_slice())).abs() < 1e-9);
        }

        #[test]
        fn flip_delta_matches_full_energy(model in model_strategy(8), seed in any::<u64>(), i in 0usize..8) {
            let n = model.n();
            let i = i % n;
            let x = BinaryVector::from_index(seed % (1 << n), n);
            let y = BinaryVector::from_index(x.to_index() ^ (1 << i), n);
            let full = model.energy(&y).unwrap() - model.energy(&x).unwrap();
            prop_assert!((model.flip_delta(&x, i).unwrap() - full).abs() < 1e-9);
        }

        #[test]
        fn spin_round_trip(bits in prop::collection::vec(0u8..=1, 1..20)) {
            let x = BinaryVector::new(bits).unwrap();
            prop_assert_eq!(spin_to_binary(&binary_to_spin(&x)), x);
        }

        #[test]
        fn energy_scale_is_view_invariant(model in model_strategy(6)) {
            let s = model.energy_scale();
            prop_assert!((model.to_symmetric().energy_scale() - s).abs() < 1e-9);
            prop_assert!((model.to_upper_triangular().energy_scale() - s).abs() < 1e-9);
            prop_assert!((model.absorb_linear().energy_scale() - s).abs() < 1e-9);
        }
    }
}
