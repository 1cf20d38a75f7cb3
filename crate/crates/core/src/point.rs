use crate::rational::{abs_diff, parse_rational, Rational};
use num_traits::{One, Signed, Zero};
use std::fmt;

/// A point of the cube `[0,1]³` with exact coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point(pub [Rational; 3]);

impl Point {
    pub fn new(x: Rational, y: Rational, z: Rational) -> Self {
        Point([x, y, z])
    }

    pub fn origin() -> Self {
        Point([Rational::zero(), Rational::zero(), Rational::zero()])
    }

    pub fn from_slice(coords: &[Rational]) -> Option<Self> {
        match coords {
            [x, y, z] => Some(Point([x.clone(), y.clone(), z.clone()])),
            _ => None,
        }
    }

    pub fn coords(&self) -> &[Rational; 3] {
        &self.0
    }

    pub fn in_unit_cube(&self) -> bool {
        self.0.iter().all(|c| !c.is_negative() && c <= &Rational::one())
    }

    pub fn l1(&self, other: &Point) -> Rational {
        l1_norm_diff(&self.0, &other.0)
    }

    pub fn squared_euclidean(&self, other: &Point) -> Rational {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| {
                let d = a - b;
                &d * &d
            })
            .sum()
    }

    /// Parses `a b c` or `a,b,c` with rational coordinates.
    pub fn parse(text: &str) -> Result<Point, String> {
        let parts: Vec<&str> = text
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        if parts.len() != 3 {
            return Err(format!("expected three coordinates, found {:?}", text.trim()));
        }
        let coords = parts
            .iter()
            .map(|p| parse_rational(p).map_err(|e| e.to_string()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Point::from_slice(&coords).expect("three coordinates"))
    }

    /// Concatenated coordinates `(x, y)` as circuit inputs.
    pub fn pair_inputs(x: &Point, y: &Point) -> Vec<Rational> {
        x.0.iter().chain(&y.0).cloned().collect()
    }
}

/// `Σ |a_i − b_i|`
pub fn l1_norm_diff(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| abs_diff(x, y)).sum()
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}
