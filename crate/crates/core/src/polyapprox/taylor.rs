use crate::functions::{FunctionError, FunctionSpec};
use crate::geometry::{lp_norm, Exponent, MultiIndex, Parallelepiped, QuadratureSpec, SubsetMask};

use super::tensor_poly::{Basis, TensorPolynomial};
use super::ApproxError;

/// Mixed Taylor polynomial `T_k(f)` at `x0`:
/// `sum_{0 <= s < k} f^{(s)}(x0) prod_i (x_i - x0_i)^{s_i} / s_i!`,
/// returned in the Legendre basis of `q`.
pub fn taylor_poly(
    f: &FunctionSpec,
    k: &MultiIndex,
    x0: &[f64],
    q: &Parallelepiped,
) -> Result<TensorPolynomial, ApproxError> {
    if k.dim() != f.dim() || x0.len() != f.dim() || q.dim() != f.dim() {
        return Err(ApproxError::DimensionMismatch {
            expected: f.dim(),
            found: k.dim().max(x0.len()).max(q.dim()),
        });
    }
    if !k.is_positive() {
        return Err(ApproxError::OrderNotPositive(k.clone()));
    }
    if !q.contains(x0) {
        return Err(ApproxError::AnchorOutsideBox(x0.to_vec()));
    }
    let top = MultiIndex::new(k.entries().iter().map(|v| v - 1).collect());
    f.check_derivative(&top)?;
    let coeffs: Vec<f64> = k
        .iter_below()
        .map(|s| {
            let fact: f64 = s
                .entries()
                .iter()
                .map(|&m| (1..=m).map(|j| j as f64).product::<f64>())
                .product();
            f.derivative(&s, x0).map(|v| v / fact)
        })
        .collect::<Result<_, FunctionError>>()?;
    let mono = TensorPolynomial::new(
        k.clone(),
        coeffs,
        Basis::MonomialShifted {
            center: x0.to_vec(),
        },
    )?;
    Ok(mono.to_legendre(q))
}

/// `sum_{e != {}} prod_{i in e} delta_i^{r_i} ||f^{(r(e))}||_{p,Q}`.
pub fn taylor_remainder_bound(
    f: &FunctionSpec,
    r: &MultiIndex,
    p: Exponent,
    q: &Parallelepiped,
    quad: &QuadratureSpec,
) -> Result<f64, ApproxError> {
    if r.dim() != f.dim() || q.dim() != f.dim() {
        return Err(ApproxError::DimensionMismatch {
            expected: f.dim(),
            found: r.dim().max(q.dim()),
        });
    }
    f.check_derivative(r)?;
    let delta = q.size();
    let mut total = 0.0;
    for e in SubsetMask::nonempty(f.dim()) {
        let deriv = f.derivative_fn(&e.project(r))?;
        let weight = delta.subset_weight(r, e);
        total += weight * lp_norm(|x| crate::functions::Evaluate::eval(&deriv, x), q, p, quad);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::{corpus, lookup, Evaluate};
    use approx::assert_abs_diff_eq;

    #[test]
    fn maclaurin_of_exp() {
        let f = lookup("exp_d1").unwrap();
        let q = Parallelepiped::unit(1);
        let t = taylor_poly(&f, &MultiIndex::new(vec![2]), &[0.0], &q).unwrap();
        for x in [0.0, 0.25, 1.0] {
            assert_abs_diff_eq!(t.evaluate(&[x]), 1.0 + x, epsilon = 1e-14);
        }
    }

    #[test]
    fn reproduces_polynomials() {
        let xy = FunctionSpec::monomial(&[1, 1]);
        let q = Parallelepiped::unit(2);
        let t = taylor_poly(&xy, &MultiIndex::new(vec![2, 2]), &[0.0, 0.0], &q).unwrap();
        assert_abs_diff_eq!(t.evaluate(&[0.3, 0.7]), 0.21, epsilon = 1e-14);
        for f in corpus() {
            let Some(ext) = f.polynomial_extents() else { continue };
            let q = Parallelepiped::cube(f.dim(), -1.0, 2.0).unwrap();
            let anchor = vec![0.5; f.dim()];
            let t = taylor_poly(&f, &ext, &anchor, &q).unwrap();
            for x in [[-0.5, 1.5], [1.9, 0.1]] {
                let x = &x[..f.dim()];
                assert!((t.evaluate(x) - f.eval(x)).abs() <= 1e-12 * (1.0 + f.eval(x).abs()));
            }
        }
    }

    #[test]
    fn remainder_bound_examples() {
        let quad = QuadratureSpec::default();
        let inf = Exponent::INFINITY;
        let f = lookup("exp_d1").unwrap();
        let q = Parallelepiped::unit(1);
        let b = taylor_remainder_bound(&f, &MultiIndex::new(vec![1]), inf, &q, &quad).unwrap();
        assert_abs_diff_eq!(b, std::f64::consts::E, epsilon = 1e-12);
        let xy = FunctionSpec::monomial(&[1, 1]);
        let b = taylor_remainder_bound(&xy, &MultiIndex::new(vec![1, 1]), inf, &Parallelepiped::unit(2), &quad).unwrap();
        assert_abs_diff_eq!(b, 3.0, epsilon = 1e-12);
        let p = FunctionSpec::corpus_polynomial(2, 1);
        let b = taylor_remainder_bound(&p, &MultiIndex::new(vec![2, 2]), Exponent::TWO, &Parallelepiped::unit(2), &quad).unwrap();
        assert_eq!(b, 0.0);
    }

    #[test]
    fn capability_errors() {
        let f = lookup("abspow_d1").unwrap();
        let q = Parallelepiped::unit(1);
        assert!(matches!(
            taylor_poly(&f, &MultiIndex::new(vec![2]), &[0.5], &q),
            Err(ApproxError::Function(_))
        ));
        let g = lookup("exp_d1").unwrap();
        assert!(matches!(
            taylor_poly(&g, &MultiIndex::new(vec![2]), &[1.5], &q),
            Err(ApproxError::AnchorOutsideBox(_))
        ));
    }
}
