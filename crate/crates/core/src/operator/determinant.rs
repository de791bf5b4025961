//! Dirichlet determinants by the three-term recurrence
//! `f_n = (V_n − E) f_{n−1} − f_{n−2}`, `f_0 = 1`, `f_{−1} = 0`.

use super::logscaled::{frexp, ldexp, SignedLogDet};
use super::{Fault, Kernel};

/// The pair `(f_n, f_{n−1})·2^exp`.
#[derive(Debug, Clone, Copy)]
struct Pair {
    cur: f64,
    prev: f64,
    exp: i64,
}

impl Pair {
    const START: Pair = Pair {
        cur: 1.0,
        prev: 0.0,
        exp: 0,
    };

    #[inline]
    fn step(&mut self, c: f64, kernel: Kernel) {
        let next = if kernel.fault == Some(Fault::RecurrenceSignFlip) {
            c * self.cur + self.prev
        } else {
            c * self.cur - self.prev
        };
        self.prev = self.cur;
        self.cur = next;
        if kernel.fault != Some(Fault::DroppedRescale) {
            let (_, k) = frexp(self.cur.abs().max(self.prev.abs()));
            self.cur = ldexp(self.cur, -k);
            self.prev = ldexp(self.prev, -k);
            self.exp += i64::from(k);
        }
    }

    fn value(&self) -> SignedLogDet {
        SignedLogDet::from_scaled(self.cur, self.exp)
    }
}

/// `det` of the tridiagonal matrix with diagonal `c` and off-diagonals `−1`.
pub fn determinant(c: &[f64], kernel: Kernel) -> SignedLogDet {
    let mut p = Pair::START;
    for &ci in c {
        p.step(ci, kernel);
    }
    p.value()
}

/// `out[k]` is the determinant of the leading `k×k` block, `k = 0..=n`.
pub fn prefix_determinants(c: &[f64], kernel: Kernel) -> Vec<SignedLogDet> {
    let mut p = Pair::START;
    let mut out = Vec::with_capacity(c.len() + 1);
    out.push(p.value());
    for &ci in c {
        p.step(ci, kernel);
        out.push(p.value());
    }
    out
}

/// `out[k]` is the determinant of the trailing block `c[k..]`, `k = 0..=n`.
pub fn suffix_determinants(c: &[f64], kernel: Kernel) -> Vec<SignedLogDet> {
    let mut p = Pair::START;
    let mut out = vec![SignedLogDet::ONE; c.len() + 1];
    for k in (0..c.len()).rev() {
        p.step(c[k], kernel);
        out[k] = p.value();
    }
    out
}
