use std::cmp::{Ordering, Reverse};
use std::fmt;
use std::str::FromStr;

use crate::PolyError;

/// Variable families. The declaration order is the global variable order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tag {
    /// Coefficient indeterminates `A_i`.
    A,
    /// Initial cluster variables `X_i`.
    X,
    /// Opaque `Y_I` symbols; the index is a vertex bitmask (bit `v-1` for vertex `v`).
    Y,
    /// Positional cluster symbols of a seed.
    Z,
}

/// A variable: a family tag plus an index.
///
/// `X`, `A` and `Z` indices are 1-based vertex or position numbers. `Y`
/// indices are vertex bitmasks so that `Y_{124}` has index `0b1011`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct VarId {
    pub tag: Tag,
    pub index: u64,
}

impl VarId {
    pub const fn x(i: usize) -> VarId {
        VarId { tag: Tag::X, index: i as u64 }
    }

    pub const fn a(i: usize) -> VarId {
        VarId { tag: Tag::A, index: i as u64 }
    }

    pub const fn z(i: usize) -> VarId {
        VarId { tag: Tag::Z, index: i as u64 }
    }

    /// `Y` symbol for the vertex set encoded by `mask`.
    pub const fn y(mask: u64) -> VarId {
        VarId { tag: Tag::Y, index: mask }
    }

    /// `Y` symbol for an explicit list of 1-based vertices.
    pub fn y_of(vertices: &[usize]) -> VarId {
        VarId::y(vertices.iter().fold(0u64, |m, &v| m | (1u64 << (v - 1))))
    }

    fn order_key(&self) -> (Tag, u32, Reverse<u64>) {
        match self.tag {
            Tag::Y => (self.tag, self.index.count_ones(), Reverse(self.index.reverse_bits())),
            _ => (self.tag, 0, Reverse(!self.index)),
        }
    }
}

impl PartialOrd for VarId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `Y` symbols are ordered by set size, then lexicographically by members.
impl Ord for VarId {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order_key().cmp(&other.order_key())
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.tag {
            Tag::A => write!(f, "A{}", self.index),
            Tag::X => write!(f, "X{}", self.index),
            Tag::Z => write!(f, "Z{}", self.index),
            Tag::Y => {
                let members: Vec<u32> = (0..64).filter(|b| self.index >> b & 1 == 1).map(|b| b + 1).collect();
                if members.iter().all(|&v| v < 10) && !members.is_empty() {
                    write!(f, "Y")?;
                    for v in members {
                        write!(f, "{v}")?;
                    }
                    Ok(())
                } else {
                    let parts: Vec<String> = members.iter().map(|v| v.to_string()).collect();
                    write!(f, "Y{{{}}}", parts.join(","))
                }
            }
        }
    }
}

impl fmt::Debug for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for VarId {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || PolyError::Parse(format!("bad variable name {s:?}"));
        let mut chars = s.chars();
        let tag = match chars.next() {
            Some('A') => Tag::A,
            Some('X') => Tag::X,
            Some('Y') => Tag::Y,
            Some('Z') => Tag::Z,
            _ => return Err(bad()),
        };
        let rest = chars.as_str();
        if tag == Tag::Y {
            let members: Vec<usize> = if let Some(inner) = rest.strip_prefix('{') {
                let inner = inner.strip_suffix('}').ok_or_else(bad)?;
                if inner.is_empty() {
                    Vec::new()
                } else {
                    inner
                        .split(',')
                        .map(|p| p.trim().parse::<usize>().map_err(|_| bad()))
                        .collect::<Result<_, _>>()?
                }
            } else {
                if rest.is_empty() {
                    return Err(bad());
                }
                rest.chars().map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad)).collect::<Result<_, _>>()?
            };
            if members.iter().any(|&v| v == 0 || v > 64) {
                return Err(bad());
            }
            return Ok(VarId::y_of(&members));
        }
        let index: u64 = rest.parse().map_err(|_| bad())?;
        if index == 0 {
            return Err(bad());
        }
        Ok(VarId { tag, index })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for name in ["X4", "A1", "Z12", "Y124", "Y1", "Y{1,10}"] {
            let v: VarId = name.parse().unwrap();
            assert_eq!(v.to_string(), name);
        }
        assert!("Y".parse::<VarId>().is_err());
        assert!("Q1".parse::<VarId>().is_err());
        assert!("X0".parse::<VarId>().is_err());
    }

    #[test]
    fn order() {
        let mut v = [VarId::y_of(&[1, 3]), VarId::x(2), VarId::y_of(&[2]), VarId::a(3), VarId::y_of(&[1, 2]), VarId::x(1)];
        v.sort();
        let names: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        assert_eq!(names, ["A3", "X1", "X2", "Y2", "Y12", "Y13"]);
    }
}
