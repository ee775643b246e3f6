//! Quadrature rules on the reference elements, exact up to degree 5.

use super::FeError;
use crate::mesh::ElementShape;

pub const MAX_QUADRATURE_DEGREE: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64; 3], f64)> {
        self.points.iter().zip(self.weights.iter().copied())
    }
}

/// Gauss–Legendre points and weights on `[-1, 1]`.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    match n {
        1 => (vec![0.0], vec![2.0]),
        2 => {
            let a = 1.0 / 3f64.sqrt();
            (vec![-a, a], vec![1.0, 1.0])
        }
        3 => {
            let a = (3.0f64 / 5.0).sqrt();
            (vec![-a, 0.0, a], vec![5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0])
        }
        4 => {
            let r = 2.0 / 7.0 * (6.0f64 / 5.0).sqrt();
            let inner = (3.0 / 7.0 - r).sqrt();
            let outer = (3.0 / 7.0 + r).sqrt();
            let w_inner = (18.0 + 30f64.sqrt()) / 36.0;
            let w_outer = (18.0 - 30f64.sqrt()) / 36.0;
            (
                vec![-outer, -inner, inner, outer],
                vec![w_outer, w_inner, w_inner, w_outer],
            )
        }
        _ => unreachable!("rules above degree 7 are never requested"),
    }
}

fn points_for_degree(degree: usize) -> usize {
    degree / 2 + 1
}

fn tensor(dim: usize, degree: usize) -> QuadratureRule {
    let (x, w) = gauss_legendre(points_for_degree(degree));
    let n = x.len();
    let mut rule = QuadratureRule {
        points: Vec::new(),
        weights: Vec::new(),
    };
    let count = n.pow(dim as u32);
    for idx in 0..count {
        let mut p = [0.0; 3];
        let mut weight = 1.0;
        let mut rest = idx;
        for c in p.iter_mut().take(dim) {
            *c = x[rest % n];
            weight *= w[rest % n];
            rest /= n;
        }
        rule.points.push(p);
        rule.weights.push(weight);
    }
    rule
}

fn triangle(degree: usize) -> QuadratureRule {
    match degree {
        0 | 1 => QuadratureRule {
            points: vec![[1.0 / 3.0, 1.0 / 3.0, 0.0]],
            weights: vec![0.5],
        },
        2 => QuadratureRule {
            points: vec![
                [1.0 / 6.0, 1.0 / 6.0, 0.0],
                [2.0 / 3.0, 1.0 / 6.0, 0.0],
                [1.0 / 6.0, 2.0 / 3.0, 0.0],
            ],
            weights: vec![1.0 / 6.0; 3],
        },
        _ => {
            // Symmetric 7-point rule of degree 5.
            let s15 = 15f64.sqrt();
            let a1 = (6.0 - s15) / 21.0;
            let a2 = (6.0 + s15) / 21.0;
            let w1 = (155.0 - s15) / 2400.0;
            let w2 = (155.0 + s15) / 2400.0;
            let mut rule = QuadratureRule {
                points: vec![[1.0 / 3.0, 1.0 / 3.0, 0.0]],
                weights: vec![9.0 / 80.0],
            };
            for (a, w) in [(a1, w1), (a2, w2)] {
                let b = 1.0 - 2.0 * a;
                for p in [[a, a, 0.0], [b, a, 0.0], [a, b, 0.0]] {
                    rule.points.push(p);
                    rule.weights.push(w);
                }
            }
            rule
        }
    }
}

fn tetrahedron(degree: usize) -> QuadratureRule {
    match degree {
        0 | 1 => QuadratureRule {
            points: vec![[0.25; 3]],
            weights: vec![1.0 / 6.0],
        },
        2 => {
            let a = (5.0 + 3.0 * 5f64.sqrt()) / 20.0;
            let b = (5.0 - 5f64.sqrt()) / 20.0;
            QuadratureRule {
                points: vec![[b, b, b], [a, b, b], [b, a, b], [b, b, a]],
                weights: vec![1.0 / 24.0; 4],
            }
        }
        3 => {
            let (a, b) = (0.5, 1.0 / 6.0);
            QuadratureRule {
                points: vec![[0.25; 3], [b, b, b], [a, b, b], [b, a, b], [b, b, a]],
                weights: vec![-2.0 / 15.0, 3.0 / 40.0, 3.0 / 40.0, 3.0 / 40.0, 3.0 / 40.0],
            }
        }
        _ => collapsed_tetrahedron(degree),
    }
}

/// Conical product rule: Gauss–Legendre on the unit cube mapped onto the
/// tetrahedron by `x = u, y = v(1-u), z = w(1-u)(1-v)`.
fn collapsed_tetrahedron(degree: usize) -> QuadratureRule {
    let on_unit = |n: usize| {
        let (x, w) = gauss_legendre(n);
        let x: Vec<f64> = x.iter().map(|t| 0.5 * (t + 1.0)).collect();
        let w: Vec<f64> = w.iter().map(|t| 0.5 * t).collect();
        (x, w)
    };
    let (xu, wu) = on_unit(points_for_degree(degree + 2));
    let (xv, wv) = on_unit(points_for_degree(degree + 1));
    let (xw, ww) = on_unit(points_for_degree(degree));
    let mut rule = QuadratureRule {
        points: Vec::new(),
        weights: Vec::new(),
    };
    for (u, wu) in xu.iter().zip(&wu) {
        for (v, wv) in xv.iter().zip(&wv) {
            for (w, ww) in xw.iter().zip(&ww) {
                rule.points.push([*u, v * (1.0 - u), w * (1.0 - u) * (1.0 - v)]);
                rule.weights.push(wu * wv * ww * (1.0 - u) * (1.0 - u) * (1.0 - v));
            }
        }
    }
    rule
}

/// Rule on the reference element of `shape` that integrates polynomials of
/// degree `degree` exactly (per axis for quads and hexes).
pub fn quadrature_rule(shape: ElementShape, degree: usize) -> Result<QuadratureRule, FeError> {
    if degree > MAX_QUADRATURE_DEGREE {
        return Err(FeError::UnsupportedQuadrature { shape, degree });
    }
    Ok(match shape {
        ElementShape::Point1 => QuadratureRule {
            points: vec![[0.0; 3]],
            weights: vec![1.0],
        },
        ElementShape::Line2 => tensor(1, degree),
        ElementShape::Quad4 => tensor(2, degree),
        ElementShape::Hex8 => tensor(3, degree),
        ElementShape::Tri3 => triangle(degree),
        ElementShape::Tet4 => tetrahedron(degree),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    /// Closed-form integral of `x^a y^b z^c` over the reference element.
    fn monomial_integral(shape: ElementShape, [a, b, c]: [u32; 3]) -> f64 {
        let line = |k: u32| if k % 2 == 1 { 0.0 } else { 2.0 / f64::from(k + 1) };
        match shape {
            ElementShape::Point1 => 1.0,
            ElementShape::Line2 => line(a),
            ElementShape::Quad4 => line(a) * line(b),
            ElementShape::Hex8 => line(a) * line(b) * line(c),
            ElementShape::Tri3 => factorial(a) * factorial(b) / factorial(a + b + 2),
            ElementShape::Tet4 => factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 3),
        }
    }

    fn exponents(shape: ElementShape, degree: u32) -> Vec<[u32; 3]> {
        let dim = shape.dim();
        let mut out = Vec::new();
        for a in 0..=degree {
            for b in 0..=degree {
                for c in 0..=degree {
                    let e = [a, b, c];
                    if e.iter().skip(dim).any(|&k| k > 0) {
                        continue;
                    }
                    let ok = match shape {
                        ElementShape::Line2 | ElementShape::Quad4 | ElementShape::Hex8 => true,
                        _ => a + b + c <= degree,
                    };
                    if ok {
                        out.push(e);
                    }
                }
            }
        }
        out
    }

    #[test]
    fn weights_sum_to_reference_measure() {
        let measure = [
            (ElementShape::Line2, 2.0),
            (ElementShape::Tri3, 0.5),
            (ElementShape::Quad4, 4.0),
            (ElementShape::Tet4, 1.0 / 6.0),
            (ElementShape::Hex8, 8.0),
        ];
        for (shape, m) in measure {
            for d in 0..=MAX_QUADRATURE_DEGREE {
                let rule = quadrature_rule(shape, d).unwrap();
                let total: f64 = rule.weights.iter().sum();
                assert!((total - m).abs() < 1e-14, "{shape} degree {d}: {total}");
            }
        }
    }

    #[test]
    fn monomials_integrated_exactly() {
        for shape in ElementShape::ALL {
            for d in 0..=MAX_QUADRATURE_DEGREE as u32 {
                let rule = quadrature_rule(shape, d as usize).unwrap();
                for e in exponents(shape, d) {
                    let approx: f64 = rule
                        .iter()
                        .map(|(p, w)| w * p[0].powi(e[0] as i32) * p[1].powi(e[1] as i32) * p[2].powi(e[2] as i32))
                        .sum();
                    let exact = monomial_integral(shape, e);
                    assert!(
                        (approx - exact).abs() < 1e-14,
                        "{shape} deg {d} {e:?}: {approx} vs {exact}"
                    );
                }
            }
        }
    }

    #[test]
    fn two_point_gauss() {
        let rule = quadrature_rule(ElementShape::Line2, 3).unwrap();
        assert_eq!(rule.len(), 2);
        let a = 1.0 / 3f64.sqrt();
        assert_eq!(rule.points[0][0], -a);
        assert_eq!(rule.points[1][0], a);
        assert_eq!(rule.weights, vec![1.0, 1.0]);
        let cubic: f64 = rule.iter().map(|(p, w)| w * p[0].powi(3)).sum();
        assert_eq!(cubic, 0.0);
        let square: f64 = rule.iter().map(|(p, w)| w * p[0] * p[0]).sum();
        assert!((square - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn three_point_triangle() {
        let rule = quadrature_rule(ElementShape::Tri3, 2).unwrap();
        assert_eq!(rule.len(), 3);
        let first_moment: f64 = rule.iter().map(|(p, w)| w * p[0]).sum();
        assert!((first_moment - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn degree_six_unsupported() {
        assert!(matches!(
            quadrature_rule(ElementShape::Quad4, 6),
            Err(FeError::UnsupportedQuadrature { degree: 6, .. })
        ));
    }
}
