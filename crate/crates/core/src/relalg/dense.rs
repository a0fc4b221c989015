//! Explicit Boolean-matrix relations.
//!
//! Every construct is implemented directly from its point-wise definition
//! on element indices, without going through bit encodings, so this backend
//! serves as the reference the symbolic engine is checked against.

use super::Carrier;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DenseRelation {
    src: Carrier,
    tgt: Carrier,
    rows: usize,
    cols: usize,
    bits: Vec<bool>,
}

fn size_of(c: &Carrier) -> usize {
    c.small_size().expect("carrier too large for the dense backend")
}

fn product_parts(c: &Carrier) -> (&Carrier, &Carrier) {
    c.as_product().expect("expected a product carrier")
}

impl DenseRelation {
    pub fn empty(src: Carrier, tgt: Carrier) -> Self {
        let rows = size_of(&src);
        let cols = size_of(&tgt);
        DenseRelation {
            src,
            tgt,
            rows,
            cols,
            bits: vec![false; rows * cols],
        }
    }

    pub fn from_fn(src: Carrier, tgt: Carrier, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut d = Self::empty(src, tgt);
        for i in 0..d.rows {
            for j in 0..d.cols {
                d.bits[i * d.cols + j] = f(i, j);
            }
        }
        d
    }

    pub fn source(&self) -> &Carrier {
        &self.src
    }

    pub fn target(&self) -> &Carrier {
        &self.tgt
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.bits[i * self.cols + j] = value;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let cols = self.cols;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(k, _)| (k / cols, k % cols))
    }

    pub fn universal(src: Carrier, tgt: Carrier) -> Self {
        Self::from_fn(src, tgt, |_, _| true)
    }

    pub fn identity(c: Carrier) -> Self {
        Self::from_fn(c.clone(), c, |i, j| i == j)
    }

    pub fn point(c: Carrier, index: usize) -> Self {
        Self::from_fn(c, Carrier::Unit, |i, _| i == index)
    }

    pub fn complement(&self) -> Self {
        Self::from_fn(self.src.clone(), self.tgt.clone(), |i, j| !self.get(i, j))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.tgt.clone(), self.src.clone(), |i, j| self.get(j, i))
    }

    pub fn union(&self, other: &Self) -> Self {
        assert_eq!((&self.src, &self.tgt), (&other.src, &other.tgt));
        Self::from_fn(self.src.clone(), self.tgt.clone(), |i, j| {
            self.get(i, j) || other.get(i, j)
        })
    }

    pub fn inter(&self, other: &Self) -> Self {
        assert_eq!((&self.src, &self.tgt), (&other.src, &other.tgt));
        Self::from_fn(self.src.clone(), self.tgt.clone(), |i, j| {
            self.get(i, j) && other.get(i, j)
        })
    }

    /// Boolean matrix product.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.tgt, other.src);
        Self::from_fn(self.src.clone(), other.tgt.clone(), |i, k| {
            (0..self.cols).any(|j| self.get(i, j) && other.get(j, k))
        })
    }

    /// `syq(R, S)_{y,z}` iff rows `x` agree on column `y` of `R` and column `z` of `S`.
    pub fn syq(&self, other: &Self) -> Self {
        assert_eq!(self.src, other.src);
        Self::from_fn(self.tgt.clone(), other.tgt.clone(), |y, z| {
            (0..self.rows).all(|x| self.get(x, y) == other.get(x, z))
        })
    }

    pub fn pi(prod: Carrier) -> Self {
        let (_, r) = product_parts(&prod);
        let (l, rs) = (product_parts(&prod).0.clone(), size_of(r));
        Self::from_fn(prod, l, |u, x| u / rs == x)
    }

    pub fn rho(prod: Carrier) -> Self {
        let (_, r) = product_parts(&prod);
        let (r, rs) = (r.clone(), size_of(r));
        Self::from_fn(prod, r, |u, y| u % rs == y)
    }

    pub fn pairing(&self, other: &Self) -> Self {
        assert_eq!(self.src, other.src);
        let ys = other.cols;
        let tgt = Carrier::product(self.tgt.clone(), other.tgt.clone());
        Self::from_fn(self.src.clone(), tgt, |z, u| self.get(z, u / ys) && other.get(z, u % ys))
    }

    pub fn exchange(sq: Carrier) -> Self {
        let n = size_of(product_parts(&sq).0);
        Self::from_fn(sq.clone(), sq, |u, v| u / n == v % n && u % n == v / n)
    }

    pub fn vec(&self) -> Self {
        let cols = self.cols;
        let src = Carrier::product(self.src.clone(), self.tgt.clone());
        Self::from_fn(src, Carrier::Unit, |u, _| self.get(u / cols, u % cols))
    }

    pub fn rel_of(&self) -> Self {
        let (x, y) = product_parts(&self.src);
        let ys = size_of(y);
        Self::from_fn(x.clone(), y.clone(), |a, b| self.get(a * ys + b, 0))
    }

    pub fn eps(inner: Carrier) -> Self {
        let pow = Carrier::powerset(inner.clone());
        Self::from_fn(inner, pow, |x, set| (set >> x) & 1 == 1)
    }

    pub fn omega(inner: Carrier) -> Self {
        let pow = Carrier::powerset(inner);
        Self::from_fn(pow.clone(), pow, |y, z| y.count_ones() <= z.count_ones())
    }

    /// Embedding of the subset described by a vector, with its index map.
    pub fn inj(&self, name: &str) -> (Self, Vec<usize>) {
        let members: Vec<usize> = (0..self.rows).filter(|&i| self.get(i, 0)).collect();
        let sub = Carrier::base(name, members.len());
        let d = Self::from_fn(sub, self.src.clone(), |y, x| members[y] == x);
        (d, members)
    }
}
