//! Gaussian quadrature on triangles.
//!
//! Rules are stored in barycentric coordinates with weights normalized to
//! sum to one, so `integral over T of f ~= area(T) * sum_q w_q f(x_q)`.
//!
//! | points | degree | structure |
//! |--------|--------|-----------|
//! | 1      | 1      | centroid |
//! | 3      | 2      | one S21 orbit |
//! | 4      | 3      | Stroud conical product (positive weights, not symmetric) |
//! | 6      | 4      | two S21 orbits (Dunavant) |
//! | 12     | 6      | two S21 + one S111 orbit (Dunavant) |
//! | 25     | 10     | centroid + two S21 + three S111 orbits (Dunavant) |
//!
//! The only fully symmetric 4-point degree-3 rule has a negative centroid
//! weight (-9/16); the conical product rule is used instead.

use alloc::vec::Vec;

use crate::{Error, Point, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    /// Barycentric coordinates of the points.
    pub points: Vec<[f64; 3]>,
    /// Weights summing to one.
    pub weights: Vec<f64>,
    /// Highest total degree integrated exactly.
    pub exact_degree: u32,
}

pub const SUPPORTED_POINT_COUNTS: [usize; 6] = [1, 3, 4, 6, 12, 25];

struct Builder {
    points: Vec<[f64; 3]>,
    weights: Vec<f64>,
}

impl Builder {
    fn new() -> Self {
        Builder {
            points: Vec::new(),
            weights: Vec::new(),
        }
    }

    fn centroid(mut self, w: f64) -> Self {
        let third = 1.0 / 3.0;
        self.points.push([third, third, third]);
        self.weights.push(w);
        self
    }

    /// Orbit of `(a, a, 1 - 2a)`.
    fn s21(mut self, a: f64, w: f64) -> Self {
        let b = 1.0 - 2.0 * a;
        for p in [[a, a, b], [a, b, a], [b, a, a]] {
            self.points.push(p);
            self.weights.push(w);
        }
        self
    }

    /// Orbit of `(a, b, 1 - a - b)`.
    fn s111(mut self, a: f64, b: f64, w: f64) -> Self {
        let c = 1.0 - a - b;
        for p in [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]] {
            self.points.push(p);
            self.weights.push(w);
        }
        self
    }

    fn finish(self, exact_degree: u32) -> QuadratureRule {
        QuadratureRule {
            points: self.points,
            weights: self.weights,
            exact_degree,
        }
    }
}

fn conical_product_4() -> QuadratureRule {
    // Gauss-Jacobi nodes for the weight (1 - u) on [0, 1] along x, and
    // Gauss-Legendre along the collapsed direction.
    let s6 = libm::sqrt(6.0);
    let u = [(4.0 - s6) / 10.0, (4.0 + s6) / 10.0];
    let wu = [(9.0 + s6) / 36.0, (9.0 - s6) / 36.0];
    let g = 0.5 / libm::sqrt(3.0);
    let v = [0.5 - g, 0.5 + g];
    let mut b = Builder::new();
    for (ui, wi) in u.iter().zip(wu.iter()) {
        for vj in v {
            let x = *ui;
            let y = (1.0 - ui) * vj;
            b.points.push([1.0 - x - y, x, y]);
            b.weights.push(*wi);
        }
    }
    b.finish(3)
}

/// Returns the rule with `n_points` points.
pub fn rule(n_points: usize) -> Result<QuadratureRule> {
    Ok(match n_points {
        1 => Builder::new().centroid(1.0).finish(1),
        3 => Builder::new().s21(1.0 / 6.0, 1.0 / 3.0).finish(2),
        4 => conical_product_4(),
        6 => Builder::new()
            .s21(0.445_948_490_915_964_886_32, 0.223_381_589_678_011_465_70)
            .s21(0.091_576_213_509_770_743_46, 0.109_951_743_655_321_867_64)
            .finish(4),
        12 => Builder::new()
            .s21(0.063_089_014_491_502_228_34, 0.050_844_906_370_206_816_921)
            .s21(0.249_286_745_170_910_421_29, 0.116_786_275_726_379_366_03)
            .s111(
                0.053_145_049_844_816_947_353,
                0.310_352_451_033_784_405_42,
                0.082_851_075_618_373_575_194,
            )
            .finish(6),
        25 => Builder::new()
            .centroid(0.090_817_990_382_753_580_095)
            .s21(0.485_577_633_383_657_377_37, 0.036_725_957_756_466_704_717)
            .s21(0.109_481_575_485_037_054_8, 0.045_321_059_435_527_934_783)
            .s111(
                0.141_707_219_414_879_954_76,
                0.307_939_838_764_120_950_17,
                0.072_757_916_845_420_108_604,
            )
            .s111(
                0.025_003_534_762_686_386_074,
                0.246_672_560_639_902_693_92,
                0.028_327_242_531_057_484_837,
            )
            .s111(
                0.009_540_815_400_299_457_580_2,
                0.066_803_251_012_200_265_774,
                0.009_421_666_963_732_823_459_9,
            )
            .finish(10),
        other => return Err(Error::UnsupportedQuadrature(other)),
    })
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Physical quadrature points and weights (already multiplied by the
    /// triangle area).
    pub fn mapped(&self, tri: [Point; 3]) -> impl Iterator<Item = (Point, f64)> + '_ {
        let area = triangle_area(tri);
        self.points.iter().zip(self.weights.iter()).map(move |(l, w)| {
            let p = [
                l[0] * tri[0][0] + l[1] * tri[1][0] + l[2] * tri[2][0],
                l[0] * tri[0][1] + l[1] * tri[1][1] + l[2] * tri[2][1],
            ];
            (p, w * area)
        })
    }
}

pub fn triangle_area(tri: [Point; 3]) -> f64 {
    let [a, b, c] = tri;
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1])).abs()
}

pub fn integrate_on_triangle(rule: &QuadratureRule, tri: [Point; 3], f: impl Fn(Point) -> f64) -> f64 {
    rule.mapped(tri).map(|(p, w)| w * f(p)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_uniform_mesh;

    const REFERENCE: [Point; 3] = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];

    fn factorial(n: u32) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    /// Exact integral of x^i y^j over the reference triangle.
    fn monomial_exact(i: u32, j: u32) -> f64 {
        factorial(i) * factorial(j) / factorial(i + j + 2)
    }

    fn monomial_error(r: &QuadratureRule, i: u32, j: u32) -> f64 {
        let q = integrate_on_triangle(r, REFERENCE, |p| p[0].powi(i as i32) * p[1].powi(j as i32));
        (q - monomial_exact(i, j)).abs() / monomial_exact(i, j)
    }

    #[test]
    fn exact_to_declared_degree_and_sharp() {
        for n in SUPPORTED_POINT_COUNTS {
            let r = rule(n).unwrap();
            assert_eq!(r.len(), n);
            assert!((r.weights.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            assert!(r.weights.iter().all(|&w| w > 0.0));
            assert!(r.points.iter().flatten().all(|&l| (0.0..=1.0).contains(&l)));
            let d = r.exact_degree;
            for deg in 0..=d {
                for i in 0..=deg {
                    let e = monomial_error(&r, i, deg - i);
                    assert!(e <= 1e-12, "{n}-point rule, x^{i} y^{}: {e}", deg - i);
                }
            }
            let beyond = (0..=d + 1).map(|i| monomial_error(&r, i, d + 1 - i)).fold(0.0, f64::max);
            assert!(beyond > 1e-10, "{n}-point rule exact beyond degree {d}");
        }
    }

    #[test]
    fn rejects_unsupported_count() {
        assert_eq!(rule(5), Err(Error::UnsupportedQuadrature(5)));
    }

    #[test]
    fn centroid_rule_integrates_x() {
        let r = rule(1).unwrap();
        assert!((integrate_on_triangle(&r, REFERENCE, |p| p[0]) - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn four_point_rule_values() {
        let r = rule(4).unwrap();
        assert!((integrate_on_triangle(&r, REFERENCE, |p| p[0] * p[0] * p[1]) - 1.0 / 60.0).abs() < 1e-14);
        assert!((integrate_on_triangle(&r, REFERENCE, |p| p[0]) - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn six_point_rule_fails_beyond_degree_four() {
        let r = rule(6).unwrap();
        assert!(monomial_error(&r, 4, 0) < 1e-13);
        assert!(monomial_error(&r, 6, 0) > 1e-6);
    }

    #[test]
    fn constant_over_any_triangle_is_area() {
        let tri = [[0.3, 0.1], [1.7, 0.4], [0.2, 2.2]];
        for n in SUPPORTED_POINT_COUNTS {
            let r = rule(n).unwrap();
            assert!((integrate_on_triangle(&r, tri, |_| 1.0) - triangle_area(tri)).abs() < 1e-14);
        }
    }

    #[test]
    fn symmetric_rules_are_invariant_under_vertex_permutations() {
        for n in [1, 3, 6, 12, 25] {
            let r = rule(n).unwrap();
            for perm in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
                for (p, w) in r.points.iter().zip(r.weights.iter()) {
                    let q = [p[perm[0]], p[perm[1]], p[perm[2]]];
                    let found = r.points.iter().zip(r.weights.iter()).any(|(s, v)| {
                        (0..3).all(|k| (s[k] - q[k]).abs() < 1e-15) && (v - w).abs() < 1e-15
                    });
                    assert!(found, "{n}-point rule not symmetric");
                }
            }
        }
    }

    #[test]
    fn unit_square_area_and_beta_integrals() {
        let mesh = build_uniform_mesh(9).unwrap();
        let r = rule(25).unwrap();
        let g = |t: f64| t * t * (1.0 - t) * (1.0 - t);
        let mut area = 0.0;
        let mut psi = 0.0;
        let mut psi_sq = 0.0;
        for t in 0..mesh.triangle_count() {
            let tri = mesh.triangle_points(t);
            area += integrate_on_triangle(&r, tri, |_| 1.0);
            psi += integrate_on_triangle(&r, tri, |p| g(p[0]) * g(p[1]));
            psi_sq += integrate_on_triangle(&r, tri, |p| (g(p[0]) * g(p[1])).powi(2));
        }
        assert!((area - 1.0).abs() < 1e-13);
        // B(3,3)^2 and B(5,5)^2
        assert!((psi - 1.0 / 900.0).abs() < 1e-15);
        assert!((psi_sq - 1.0 / (630.0 * 630.0)).abs() < 1e-12 / 630.0 / 630.0 * 1e3);
    }
}
