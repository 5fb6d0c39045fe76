//! Parameters `(n, k)` and tagged complex points.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The parameter pair of the generalized sine `S_{n,k}`.
///
/// `n` is the integer symmetry order and `k` the (possibly non-integer)
/// exponent numerator, with `0 < k < n`. The kernel is `(1 - z^n)^(-k/n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub n: u32,
    pub k: f64,
}

impl Params {
    pub fn new(n: u32, k: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParams(format!("n must be >= 2, got {n}")));
        }
        if !k.is_finite() || k <= 0.0 || k >= n as f64 {
            return Err(Error::InvalidParams(format!(
                "k must satisfy 0 < k < n = {n}, got {k}"
            )));
        }
        Ok(Self { n, k })
    }

    pub fn nf(&self) -> f64 {
        self.n as f64
    }

    /// Branch exponent `k/n`.
    pub fn alpha(&self) -> f64 {
        self.k / self.nf()
    }

    /// Half-opening `pi/n` of the sector, i.e. the inclination of the bisector.
    pub fn half_angle(&self) -> f64 {
        PI / self.nf()
    }

    /// Opening angle `2pi/n` of the fundamental sector.
    pub fn sector_angle(&self) -> f64 {
        2.0 * PI / self.nf()
    }

    /// Primitive root of unity `e^{2 pi i / n}`.
    pub fn omega(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.sector_angle())
    }

    /// `omega^j` for any integer `j`, reduced mod `n` before evaluating.
    pub fn omega_pow(&self, j: i64) -> Complex64 {
        let j = j.rem_euclid(self.n as i64);
        match j {
            0 => Complex64::new(1.0, 0.0),
            _ => Complex64::from_polar(1.0, self.sector_angle() * j as f64),
        }
    }

    /// Unit vector along the bisector `L_n`.
    pub fn bisector(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.half_angle())
    }

    pub fn is_integer_k(&self) -> bool {
        self.k.fract() == 0.0
    }

    /// Integer value of `k`, if it is one.
    pub fn k_int(&self) -> Option<u32> {
        self.is_integer_k().then_some(self.k as u32)
    }

    /// True when the image polygon closes at a finite vertex `P`.
    pub fn has_vertex(&self) -> bool {
        self.k > 1.0
    }

    /// `p = n / (n - k)`: the substitution power that regularizes the corner
    /// singularity `(1 - x)^(-k/n)`.
    pub fn corner_power(&self) -> f64 {
        self.nf() / (self.nf() - self.k)
    }
}

/// Which plane a point belongs to: the range of `S` (z-plane) or its domain
/// (w-plane).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Plane {
    ZPlane,
    WPlane,
}

impl Plane {
    pub fn flip(self) -> Self {
        match self {
            Plane::ZPlane => Plane::WPlane,
            Plane::WPlane => Plane::ZPlane,
        }
    }
}

/// A finite complex number tagged with the plane it lives in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
    pub plane: Plane,
}

impl ComplexValue {
    pub fn new(value: Complex64, plane: Plane) -> Self {
        Self {
            re: value.re,
            im: value.im,
            plane,
        }
    }

    pub fn z(value: Complex64) -> Self {
        Self::new(value, Plane::ZPlane)
    }

    pub fn w(value: Complex64) -> Self {
        Self::new(value, Plane::WPlane)
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    /// Image of this point under a map between the two planes.
    pub fn mapped(&self, value: Complex64) -> Self {
        Self::new(value, self.plane.flip())
    }
}

/// Serialize complex numbers as `{"re": .., "im": ..}`.
pub(crate) mod complex_serde {
    use num_complex::Complex64;
    use serde::ser::SerializeStruct;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(c: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Complex", 2)?;
        st.serialize_field("re", &c.re)?;
        st.serialize_field("im", &c.im)?;
        st.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            re: f64,
            im: f64,
        }
        let raw = Raw::deserialize(d)?;
        Ok(Complex64::new(raw.re, raw.im))
    }

    pub mod option {
        use num_complex::Complex64;
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(c: &Option<Complex64>, s: S) -> Result<S::Ok, S::Error> {
            match c {
                Some(c) => super::serialize(c, s),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Complex64>, D::Error> {
            #[derive(Deserialize)]
            struct Raw {
                re: f64,
                im: f64,
            }
            let raw: Option<Raw> = Option::deserialize(d)?;
            Ok(raw.map(|r| Complex64::new(r.re, r.im)))
        }
    }
}
