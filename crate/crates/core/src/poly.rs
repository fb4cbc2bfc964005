//! Bivariate polynomials of total degree at most five.

/// Number of monomials `x^i y^j` with `i + j <= 5`.
pub const QUINTIC_DIM: usize = 21;

/// Exponents `(i, j)` in graded order: `1, x, y, x^2, xy, y^2, x^3, ...`.
pub const EXPONENTS: [(u32, u32); QUINTIC_DIM] = {
    let mut out = [(0, 0); QUINTIC_DIM];
    let mut k = 0;
    let mut deg = 0;
    while deg <= 5 {
        let mut i = deg;
        loop {
            out[k] = (i, deg - i);
            k += 1;
            if i == 0 {
                break;
            }
            i -= 1;
        }
        deg += 1;
    }
    out
};

/// Value and derivatives up to second order of one scalar field at a point.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub dx: f64,
    pub dy: f64,
    pub dxx: f64,
    pub dxy: f64,
    pub dyy: f64,
}

impl Jet {
    pub fn gradient(&self) -> [f64; 2] {
        [self.dx, self.dy]
    }

    pub fn laplacian(&self) -> f64 {
        self.dxx + self.dyy
    }

    /// Entries in [`crate::mesh::VertexDof`] order.
    pub fn as_array(&self) -> [f64; 6] {
        [self.value, self.dx, self.dy, self.dxx, self.dxy, self.dyy]
    }

    pub fn scaled(self, s: f64) -> Jet {
        Jet {
            value: s * self.value,
            dx: s * self.dx,
            dy: s * self.dy,
            dxx: s * self.dxx,
            dxy: s * self.dxy,
            dyy: s * self.dyy,
        }
    }

    pub fn add_scaled(&mut self, s: f64, other: &Jet) {
        self.value += s * other.value;
        self.dx += s * other.dx;
        self.dy += s * other.dy;
        self.dxx += s * other.dxx;
        self.dxy += s * other.dxy;
        self.dyy += s * other.dyy;
    }
}

/// Jets of all 21 monomials at `(x, y)`.
pub fn monomial_jets(x: f64, y: f64) -> [Jet; QUINTIC_DIM] {
    let mut px = [1.0; 6];
    let mut py = [1.0; 6];
    for k in 1..6 {
        px[k] = px[k - 1] * x;
        py[k] = py[k - 1] * y;
    }
    // d/dt t^i = i t^(i-1), zero when i == 0
    let d1 = |p: &[f64; 6], i: u32| if i == 0 { 0.0 } else { i as f64 * p[i as usize - 1] };
    let d2 = |p: &[f64; 6], i: u32| {
        if i < 2 {
            0.0
        } else {
            (i * (i - 1)) as f64 * p[i as usize - 2]
        }
    };
    let mut out = [Jet::default(); QUINTIC_DIM];
    for (jet, &(i, j)) in out.iter_mut().zip(EXPONENTS.iter()) {
        let (xi, yj) = (px[i as usize], py[j as usize]);
        *jet = Jet {
            value: xi * yj,
            dx: d1(&px, i) * yj,
            dy: xi * d1(&py, j),
            dxx: d2(&px, i) * yj,
            dxy: d1(&px, i) * d1(&py, j),
            dyy: xi * d2(&py, j),
        };
    }
    out
}

/// Polynomial `sum_k c_k x^i_k y^j_k` in the [`EXPONENTS`] basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Quintic {
    pub coeffs: [f64; QUINTIC_DIM],
}

impl Quintic {
    pub fn jet(&self, x: f64, y: f64) -> Jet {
        let mut out = Jet::default();
        for (c, m) in self.coeffs.iter().zip(monomial_jets(x, y).iter()) {
            out.add_scaled(*c, m);
        }
        out
    }
}
