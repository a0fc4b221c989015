use std::fmt;

use num_bigint::BigUint;

/// A finite typed domain.
///
/// Bit encoding: `Base` elements are binary numbers (most significant bit
/// first) over `⌈log2 size⌉` bits, with indices `>= size` outside the care
/// set. A `Product` concatenates the left and right encodings. A
/// `Powerset` uses one bit per inner element (bit `j` set iff element `j`
/// is a member).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Carrier {
    Unit,
    Base { name: String, size: usize },
    Product(Box<Carrier>, Box<Carrier>),
    Powerset(Box<Carrier>),
}

impl Carrier {
    pub fn base(name: impl Into<String>, size: usize) -> Carrier {
        Carrier::Base {
            name: name.into(),
            size,
        }
    }

    pub fn product(left: Carrier, right: Carrier) -> Carrier {
        Carrier::Product(Box::new(left), Box::new(right))
    }

    pub fn powerset(inner: Carrier) -> Carrier {
        Carrier::Powerset(Box::new(inner))
    }

    pub fn size(&self) -> BigUint {
        match self {
            Carrier::Unit => BigUint::from(1u8),
            Carrier::Base { size, .. } => BigUint::from(*size),
            Carrier::Product(l, r) => l.size() * r.size(),
            Carrier::Powerset(inner) => match inner.small_size() {
                Some(m) => BigUint::from(1u8) << m,
                None => panic!("powerset over a carrier too large to enumerate"),
            },
        }
    }

    /// The size when it fits comfortably in memory-indexable range (< 2^48).
    pub fn small_size(&self) -> Option<usize> {
        const LIMIT: usize = 1 << 48;
        let s = match self {
            Carrier::Unit => 1,
            Carrier::Base { size, .. } => *size,
            Carrier::Product(l, r) => l.small_size()?.checked_mul(r.small_size()?)?,
            Carrier::Powerset(inner) => {
                let m = inner.small_size()?;
                if m >= 48 {
                    return None;
                }
                1usize << m
            }
        };
        (s < LIMIT).then_some(s)
    }

    /// Number of encoding bits.
    pub fn width(&self) -> u32 {
        match self {
            Carrier::Unit => 0,
            Carrier::Base { size, .. } => base_width(*size),
            Carrier::Product(l, r) => l.width().saturating_add(r.width()),
            Carrier::Powerset(inner) => match inner.small_size() {
                Some(m) => u32::try_from(m).unwrap_or(u32::MAX),
                None => u32::MAX,
            },
        }
    }

    pub fn is_unit(&self) -> bool {
        matches!(self, Carrier::Unit)
    }

    /// Bits of the element with the given index.
    pub fn encode(&self, index: usize) -> Vec<bool> {
        let mut bits = Vec::with_capacity(self.width() as usize);
        self.encode_into(index, &mut bits);
        bits
    }

    fn encode_into(&self, index: usize, bits: &mut Vec<bool>) {
        match self {
            Carrier::Unit => {}
            Carrier::Base { size, .. } => {
                let w = base_width(*size);
                for k in (0..w).rev() {
                    bits.push((index >> k) & 1 == 1);
                }
            }
            Carrier::Product(l, r) => {
                let rs = r.small_size().expect("product too large to index");
                l.encode_into(index / rs, bits);
                r.encode_into(index % rs, bits);
            }
            Carrier::Powerset(inner) => {
                let m = inner.small_size().expect("powerset too large to index");
                for j in 0..m {
                    bits.push((index >> j) & 1 == 1);
                }
            }
        }
    }

    /// Index of the element with the given bits (`bits.len() == width`).
    pub fn decode(&self, bits: &[bool]) -> usize {
        match self {
            Carrier::Unit => 0,
            Carrier::Base { .. } => bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize),
            Carrier::Product(l, r) => {
                let (lb, rb) = bits.split_at(l.width() as usize);
                let rs = r.small_size().expect("product too large to index");
                l.decode(lb) * rs + r.decode(rb)
            }
            Carrier::Powerset(_) => bits
                .iter()
                .enumerate()
                .fold(0, |acc, (j, &b)| acc | ((b as usize) << j)),
        }
    }

    /// Split a product carrier into its components.
    pub fn as_product(&self) -> Option<(&Carrier, &Carrier)> {
        match self {
            Carrier::Product(l, r) => Some((l, r)),
            _ => None,
        }
    }

    pub fn as_powerset(&self) -> Option<&Carrier> {
        match self {
            Carrier::Powerset(inner) => Some(inner),
            _ => None,
        }
    }
}

pub(crate) fn base_width(size: usize) -> u32 {
    if size <= 1 {
        0
    } else {
        usize::BITS - (size - 1).leading_zeros()
    }
}

impl fmt::Display for Carrier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Carrier::Unit => write!(f, "unit"),
            Carrier::Base { name, .. } => write!(f, "{name}"),
            Carrier::Product(l, r) => {
                write!(f, "{l}*")?;
                if matches!(**r, Carrier::Product(..)) {
                    write!(f, "({r})")
                } else {
                    write!(f, "{r}")
                }
            }
            Carrier::Powerset(inner) => {
                if matches!(**inner, Carrier::Product(..)) {
                    write!(f, "pow ({inner})")
                } else {
                    write!(f, "pow {inner}")
                }
            }
        }
    }
}
