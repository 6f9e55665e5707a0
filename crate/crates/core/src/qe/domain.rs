use num_integer::Integer;
use smallvec::{smallvec, SmallVec};

use crate::ast::{Atom, Card, Formula, Level};
use crate::descriptor::{Count, Descriptor};

/// The cardinality classes a diagram distinguishes: the exact counts
/// `0..K`, the finite counts `≥ K` split by residue modulo `L`, and
/// infinity.
///
/// A formula whose count indices are below `K` and whose moduli divide `L`
/// cannot tell apart two cardinalities of the same class. Without `Fin` and
/// `Res` in the vocabulary the large finite counts and infinity are one
/// class, so `fin` is false and `l` is 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Domain {
    pub k: u32,
    pub l: u32,
    pub fin: bool,
}

impl Domain {
    pub fn new(k: u32, l: u32) -> Domain {
        assert!(l >= 1);
        Domain { k, l, fin: true }
    }

    /// Classes `0..K` and "at least `K`, possibly infinite".
    pub fn counts_only(k: u32) -> Domain {
        Domain { k, l: 1, fin: false }
    }

    /// The smallest domain in which `f` and everything it is built from can
    /// be evaluated exactly.
    pub fn for_formula(f: &Formula) -> Domain {
        let l = modulus_lcm(f);
        let k = threshold(f, l);
        if f.level() == Level::L1 {
            Domain::counts_only(k)
        } else {
            Domain::new(k, l)
        }
    }

    /// The least domain containing both.
    pub fn join(self, other: Domain) -> Domain {
        let k = self.k.max(other.k);
        if self.fin || other.fin {
            Domain::new(k, self.l.lcm(&other.l))
        } else {
            Domain::counts_only(k)
        }
    }

    pub fn size(self) -> usize {
        if self.fin {
            (self.k + self.l + 1) as usize
        } else {
            self.k as usize + 1
        }
    }

    /// The class of infinite cardinalities.
    pub fn inf(self) -> usize {
        self.size() - 1
    }

    pub fn class_of(self, c: Card) -> usize {
        match c {
            Card::Infinite => self.inf(),
            Card::Finite(n) if n < self.k as u64 => n as usize,
            Card::Finite(_) if !self.fin => self.inf(),
            Card::Finite(n) => self.k as usize + (n % self.l as u64) as usize,
        }
    }

    /// The least cardinality in a class.
    pub fn representative(self, class: usize) -> Card {
        let (k, l) = (self.k as u64, self.l as u64);
        let c = class as u64;
        if c < k {
            Card::Finite(c)
        } else if !self.fin {
            Card::Finite(k)
        } else if c < k + l {
            let rho = c - k;
            Card::Finite(k + (rho + l - k % l) % l)
        } else {
            Card::Infinite
        }
    }

    /// The exact set of cardinalities in a class.
    pub fn descriptor(self, class: usize) -> Descriptor {
        let c = class as u64;
        let (k, l) = (self.k as u64, self.l as u64);
        if c < k {
            Descriptor::exact(c)
        } else if !self.fin {
            Descriptor::at_least(k)
        } else if c < k + l {
            Descriptor::residues(l, [c - k]).with_count(Count::AtLeast(k))
        } else {
            Descriptor::must_not_fin()
        }
    }
}

pub(crate) fn modulus_lcm(f: &Formula) -> u32 {
    let mut l = 1u32;
    f.visit_atoms(&mut |a| {
        if let Atom::Res { modulus, .. } = a {
            l = l.lcm(modulus);
        }
    });
    l
}

/// How far exact counts must be tracked. A projection adds two
/// cardinalities, each known up to `k` exactly and modulo `L` above, so the
/// sum is determined by its class once the bound reaches `2k + L − 1`.
pub(crate) fn threshold(f: &Formula, l: u32) -> u32 {
    match f {
        Formula::Const(_) => 1,
        Formula::Atom(Atom::AtLeast(k, _)) => (*k).max(1),
        Formula::Atom(_) => 1,
        Formula::Not(g) => threshold(g, l),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            threshold(a, l).max(threshold(b, l))
        }
        Formula::Exists(_, g) | Formula::Forall(_, g) => 2 * threshold(g, l) + l - 1,
    }
}

/// A set of classes.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Label(SmallVec<[u64; 2]>);

impl Label {
    pub fn empty(n: usize) -> Label {
        Label(smallvec![0; n.div_ceil(64)])
    }

    pub fn full(n: usize) -> Label {
        let mut l = Label::empty(n);
        for i in 0..n {
            l.insert(i);
        }
        l
    }

    pub fn single(n: usize, i: usize) -> Label {
        let mut l = Label::empty(n);
        l.insert(i);
        l
    }

    pub fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    pub fn union_with(&mut self, other: &Label) {
        for (a, b) in self.0.iter_mut().zip(other.0.iter()) {
            *a |= b;
        }
    }

    pub fn intersect(&self, other: &Label) -> Label {
        Label(self.0.iter().zip(other.0.iter()).map(|(a, b)| a & b).collect())
    }

    pub fn minus(&self, other: &Label) -> Label {
        Label(self.0.iter().zip(other.0.iter()).map(|(a, b)| a & !b).collect())
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &bits)| {
            (0..64).filter(move |b| bits >> b & 1 == 1).map(move |b| w * 64 + b)
        })
    }
}
