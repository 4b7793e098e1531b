use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::ToPrimitive;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Exact rational scalar used for areas and intermediate geometry.
pub type Rational = Ratio<i128>;

/// A point with exact rational coordinates, stored homogeneously as
/// `(x / w, y / w)` with `w > 0` and `gcd(x, y, w) = 1`.
///
/// Traced contours only produce integer corners (`w = 1`); subdividing long
/// edges and averaging tile centers introduce small denominators.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Point {
    pub(crate) x: i64,
    pub(crate) y: i64,
    pub(crate) w: i64,
}

impl Point {
    pub const fn int(x: i64, y: i64) -> Self {
        Point { x, y, w: 1 }
    }

    /// Builds `(x / w, y / w)`. Panics if `w == 0`.
    pub fn new(x: i64, y: i64, w: i64) -> Self {
        assert!(w != 0, "zero denominator");
        let (mut x, mut y, mut w) = (x, y, w);
        if w < 0 {
            x = -x;
            y = -y;
            w = -w;
        }
        let g = x.gcd(&y).gcd(&w);
        if g > 1 {
            x /= g;
            y /= g;
            w /= g;
        }
        Point { x, y, w }
    }

    /// Builds a point from two rationals; `None` if the common denominator
    /// does not fit in 64 bits.
    pub fn from_rationals(x: Rational, y: Rational) -> Option<Self> {
        let den = x.denom().lcm(y.denom());
        let xn = x.numer() * (den / x.denom());
        let yn = y.numer() * (den / y.denom());
        Some(Point::new(i64::try_from(xn).ok()?, i64::try_from(yn).ok()?, i64::try_from(den).ok()?))
    }

    /// Center of the tile `(tx, ty)`.
    pub fn tile_center(tx: i64, ty: i64) -> Self {
        Point::new(2 * tx + 1, 2 * ty + 1, 2)
    }

    pub fn x(&self) -> Rational {
        Ratio::new(self.x as i128, self.w as i128)
    }

    pub fn y(&self) -> Rational {
        Ratio::new(self.y as i128, self.w as i128)
    }

    pub fn xf(&self) -> f64 {
        self.x as f64 / self.w as f64
    }

    pub fn yf(&self) -> f64 {
        self.y as f64 / self.w as f64
    }

    pub fn denom(&self) -> i64 {
        self.w
    }

    pub fn is_integral(&self) -> bool {
        self.w == 1
    }

    /// `a + (b - a) * num / den`, exact.
    pub fn lerp(a: Point, b: Point, num: i64, den: i64) -> Point {
        let (a_w, b_w) = (a.w as i128, b.w as i128);
        let (num, den) = (num as i128, den as i128);
        let w = a_w * b_w * den;
        let x = a.x as i128 * b_w * (den - num) + b.x as i128 * a_w * num;
        let y = a.y as i128 * b_w * (den - num) + b.y as i128 * a_w * num;
        Point::from_i128(x, y, w)
    }

    pub fn midpoint(a: Point, b: Point) -> Point {
        Point::lerp(a, b, 1, 2)
    }

    pub(crate) fn from_i128(x: i128, y: i128, w: i128) -> Point {
        let g = x.gcd(&y).gcd(&w);
        let (x, y, w) = if g > 1 { (x / g, y / g, w / g) } else { (x, y, w) };
        let (x, y, w) = if w < 0 { (-x, -y, -w) } else { (x, y, w) };
        Point {
            x: i64::try_from(x).expect("coordinate overflow"),
            y: i64::try_from(y).expect("coordinate overflow"),
            w: i64::try_from(w).expect("coordinate overflow"),
        }
    }

    pub fn cmp_x(&self, other: &Point) -> Ordering {
        (self.x as i128 * other.w as i128).cmp(&(other.x as i128 * self.w as i128))
    }

    pub fn cmp_y(&self, other: &Point) -> Ordering {
        (self.y as i128 * other.w as i128).cmp(&(other.y as i128 * self.w as i128))
    }

    /// Squared Euclidean distance, exact.
    pub fn dist2(&self, other: &Point) -> Rational {
        let dx = other.x() - self.x();
        let dy = other.y() - self.y();
        dx * dx + dy * dy
    }

    pub fn dist(&self, other: &Point) -> f64 {
        rational_to_f64(&self.dist2(other)).sqrt()
    }
}

impl Ord for Point {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_x(other).then_with(|| self.cmp_y(other))
    }
}

impl PartialOrd for Point {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.w == 1 {
            write!(f, "({}, {})", self.x, self.y)
        } else {
            write!(f, "({}/{}, {}/{})", self.x, self.w, self.y, self.w)
        }
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.w == 1 {
            [self.x, self.y].serialize(s)
        } else {
            [self.xf(), self.yf()].serialize(s)
        }
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [x, y] = <[f64; 2]>::deserialize(d)?;
        let rx = rational_from_f64(x, MAX_RECOVERED_DENOMINATOR)
            .ok_or_else(|| serde::de::Error::custom("coordinate out of range"))?;
        let ry = rational_from_f64(y, MAX_RECOVERED_DENOMINATOR)
            .ok_or_else(|| serde::de::Error::custom("coordinate out of range"))?;
        Point::from_rationals(rx, ry).ok_or_else(|| serde::de::Error::custom("coordinate overflow"))
    }
}

/// Decimal coordinates are read back as the closest fraction with at most
/// this denominator; every point the pipeline emits has a far smaller one.
pub const MAX_RECOVERED_DENOMINATOR: i128 = 1_000_000;

pub fn rational_to_f64(r: &Rational) -> f64 {
    // Split off the integer part so large numerators keep their precision.
    let int = r.numer() / r.denom();
    let frac = r.numer() - int * r.denom();
    int as f64 + frac.to_f64().unwrap_or(0.0) / r.denom().to_f64().unwrap_or(1.0)
}

/// Best rational approximation of `v` with denominator `<= max_den`, via
/// continued fractions.
pub fn rational_from_f64(v: f64, max_den: i128) -> Option<Rational> {
    if !v.is_finite() || v.abs() > 1e15 {
        return None;
    }
    if v.fract() == 0.0 {
        return Some(Rational::from_integer(v as i128));
    }
    let negative = v < 0.0;
    let mut rest = v.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    for _ in 0..64 {
        let a = rest.floor();
        let ai = a as i128;
        let (p2, q2) = (ai * p1 + p0, ai * q1 + q0);
        if q2 > max_den {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = rest - a;
        if frac < 1e-12 {
            break;
        }
        rest = 1.0 / frac;
    }
    if q1 == 0 {
        return None;
    }
    let r = Rational::new(p1, q1);
    Some(if negative { -r } else { r })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_sign_and_gcd() {
        let p = Point::new(-4, 6, -2);
        assert_eq!(p, Point::int(2, -3));
        assert_eq!(Point::new(3, 6, 9), Point::new(1, 2, 3));
    }

    #[test]
    fn lerp_is_exact() {
        let a = Point::int(0, 0);
        let b = Point::int(96, 0);
        let p = Point::lerp(a, b, 1, 10);
        assert_eq!(p.x(), Rational::new(48, 5));
        assert_eq!(p.y(), Rational::from_integer(0));
    }

    #[test]
    fn decimal_recovery() {
        for (n, d) in [(48i128, 5i128), (1, 3), (-7, 12), (1001, 97)] {
            let r = Rational::new(n, d);
            let back = rational_from_f64(rational_to_f64(&r), MAX_RECOVERED_DENOMINATOR).unwrap();
            assert_eq!(back, r);
        }
    }

    #[test]
    fn json_round_trip() {
        let p = Point::new(97, 14, 6);
        let s = serde_json::to_string(&p).unwrap();
        let q: Point = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
    }
}
