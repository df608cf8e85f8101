//! Spin-form models `E(s) = c + Σ hᵢsᵢ + Σ_{i<j} Jᵢⱼsᵢsⱼ` and the exact
//! conversions to and from [`QuboModel`].

use crate::error::QuboError;
use crate::qubo::{QuboModel, SpinVector};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel<T> {
    n: usize,
    offset: T,
    fields: Vec<T>,
    /// Row-major `n × n`, nonzero only strictly above the diagonal.
    couplings: Vec<T>,
}

impl<T: Scalar> IsingModel<T> {
    pub fn new(offset: T, fields: Vec<T>, couplings: Vec<Vec<T>>) -> Result<Self, QuboError> {
        let n = fields.len();
        if n == 0 {
            return Err(QuboError::Empty);
        }
        if couplings.len() != n {
            return Err(QuboError::DimensionMismatch {
                what: "coupling rows",
                expected: n,
                found: couplings.len(),
            });
        }
        let mut flat = Vec::with_capacity(n * n);
        for (row, values) in couplings.iter().enumerate() {
            if values.len() != n {
                return Err(QuboError::DimensionMismatch {
                    what: "coupling columns",
                    expected: n,
                    found: values.len(),
                });
            }
            for (col, v) in values.iter().enumerate() {
                if col <= row && !v.is_zero() {
                    return Err(QuboError::LowerCoupling { row, col });
                }
            }
            flat.extend_from_slice(values);
        }
        if !offset.is_finite_value() {
            return Err(QuboError::NonFinite("offset"));
        }
        if !fields.iter().all(Scalar::is_finite_value) {
            return Err(QuboError::NonFinite("fields"));
        }
        if !flat.iter().all(Scalar::is_finite_value) {
            return Err(QuboError::NonFinite("couplings"));
        }
        Ok(Self {
            n,
            offset,
            fields,
            couplings: flat,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn offset(&self) -> T {
        self.offset
    }

    pub fn fields(&self) -> &[T] {
        &self.fields
    }

    /// `J_ij`; zero unless `i < j`.
    pub fn coupling(&self, i: usize, j: usize) -> T {
        self.couplings[i * self.n + j]
    }

    pub fn energy(&self, s: &SpinVector) -> Result<T, QuboError> {
        if s.len() != self.n {
            return Err(QuboError::DimensionMismatch {
                what: "spin assignment",
                expected: self.n,
                found: s.len(),
            });
        }
        let spin = |i: usize| if s.as_slice()[i] > 0 { T::one() } else { -T::one() };
        let mut total = self.offset;
        for i in 0..self.n {
            total = total + self.fields[i] * spin(i);
            for j in (i + 1)..self.n {
                total = total + self.coupling(i, j) * spin(i) * spin(j);
            }
        }
        Ok(total)
    }
}

/// Substitutes `xᵢ = (sᵢ + 1)/2` and collects constant, field and coupling terms.
pub fn qubo_to_ising<T: Scalar>(model: &QuboModel<T>) -> IsingModel<T> {
    let n = model.n();
    let quarter = |v: T| v.half().half();
    let mut offset = model.offset();
    let mut fields = vec![T::zero(); n];
    let mut couplings = vec![T::zero(); n * n];
    for i in 0..n {
        let d = model.diagonal_coefficient(i).half();
        offset = offset + d;
        fields[i] = fields[i] + d;
        for j in (i + 1)..n {
            let c = quarter(model.pair_coefficient(i, j));
            couplings[i * n + j] = c;
            offset = offset + c;
            fields[i] = fields[i] + c;
            fields[j] = fields[j] + c;
        }
    }
    IsingModel {
        n,
        offset,
        fields,
        couplings,
    }
}

/// Substitutes `sᵢ = 2xᵢ − 1`; the result is upper triangular with an empty diagonal.
pub fn ising_to_qubo<T: Scalar>(model: &IsingModel<T>) -> QuboModel<T> {
    let n = model.n;
    let two = T::two();
    let mut offset = model.offset;
    let mut linear = vec![T::zero(); n];
    let mut quadratic = vec![T::zero(); n * n];
    for i in 0..n {
        let h = model.fields[i];
        offset = offset - h;
        linear[i] = linear[i] + two * h;
        for j in (i + 1)..n {
            let jij = model.coupling(i, j);
            offset = offset + jij;
            linear[i] = linear[i] - two * jij;
            linear[j] = linear[j] - two * jij;
            quadratic[i * n + j] = two * two * jij;
        }
    }
    QuboModel::from_flat(offset, linear, quadratic)
        .expect("conversion of a valid Ising model yields a valid QUBO")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubo::{binary_to_spin, BinaryVector};

    #[test]
    fn zero_model_maps_to_zero() {
        let ising = qubo_to_ising(&QuboModel::<f64>::zeros(3).unwrap());
        assert_eq!(ising.offset(), 0.0);
        assert!(ising.fields().iter().all(|&h| h == 0.0));
        assert!((0..3).all(|i| (0..3).all(|j| ising.coupling(i, j) == 0.0)));
    }

    #[test]
    fn single_variable_substitution() {
        // 2x = s + 1
        let model = QuboModel::new(0.0, vec![2.0], vec![vec![0.0]]).unwrap();
        let ising = qubo_to_ising(&model);
        assert_eq!(ising.offset(), 1.0);
        assert_eq!(ising.fields(), &[1.0]);
        for idx in 0..2 {
            let x = BinaryVector::from_index(idx, 1);
            assert_eq!(
                ising.energy(&binary_to_spin(&x)).unwrap(),
                model.energy(&x).unwrap()
            );
        }
    }

    #[test]
    fn lower_couplings_rejected() {
        let err = IsingModel::new(0.0, vec![0.0, 0.0], vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert_eq!(err, Err(QuboError::LowerCoupling { row: 1, col: 0 }));
        let diag = IsingModel::new(0.0, vec![0.0], vec![vec![1.0]]);
        assert_eq!(diag, Err(QuboError::LowerCoupling { row: 0, col: 0 }));
    }

    #[test]
    fn ising_round_trip_on_spin_model() {
        let ising = IsingModel::<f64>::new(
            0.25,
            vec![1.0, -0.5, 2.0],
            vec![vec![0.0, 1.5, -1.0], vec![0.0, 0.0, 0.75], vec![0.0; 3]],
        )
        .unwrap();
        let qubo = ising_to_qubo(&ising);
        for idx in 0..8 {
            let x = BinaryVector::from_index(idx, 3);
            let e_spin = ising.energy(&binary_to_spin(&x)).unwrap();
            assert!((qubo.energy(&x).unwrap() - e_spin).abs() < 1e-12);
        }
        let back = qubo_to_ising(&qubo);
        assert!((back.offset() - ising.offset()).abs() < 1e-12);
        for i in 0..3 {
            assert!((back.fields()[i] - ising.fields()[i]).abs() < 1e-12);
        }
    }
}
