//! (n, m)-shuffles, their reversals, and Koszul signs of permutations.

/// An (n, m)-shuffle, stored as a mask over the `n + m` output positions;
/// `true` marks positions receiving items from the left block (in order).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shuffle {
    pub n: usize,
    pub m: usize,
    mask: Vec<bool>,
}

impl Shuffle {
    pub fn from_mask(n: usize, m: usize, mask: Vec<bool>) -> Self {
        assert_eq!(mask.len(), n + m);
        assert_eq!(mask.iter().filter(|&&b| b).count(), n);
        Shuffle { n, m, mask }
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    /// Number of inversions, i.e. pairs (left item, right item) out of order.
    pub fn inversions(&self) -> usize {
        let mut lefts_seen_after: usize = 0;
        let mut inv = 0;
        for &b in self.mask.iter().rev() {
            if b {
                lefts_seen_after += 1;
            } else {
                inv += lefts_seen_after;
            }
        }
        inv
    }

    pub fn sign(&self) -> i32 {
        if self.inversions() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// The reversed shuffle: reverse both inputs and the output.
    pub fn reversed(&self) -> Shuffle {
        Shuffle {
            n: self.n,
            m: self.m,
            mask: self.mask.iter().rev().copied().collect(),
        }
    }

    /// Interleave `left` (length n) with `right` (length m) per this shuffle.
    pub fn interleave<T: Clone>(&self, left: &[T], right: &[T]) -> Vec<T> {
        assert_eq!(left.len(), self.n);
        assert_eq!(right.len(), self.m);
        let mut li = left.iter();
        let mut ri = right.iter();
        self.mask
            .iter()
            .map(|&b| if b { li.next() } else { ri.next() }.unwrap().clone())
            .collect()
    }
}

/// All (n, m)-shuffles, in lexicographic order of their masks.
pub fn enumerate_shuffles(n: usize, m: usize) -> Vec<Shuffle> {
    let total = n + m;
    let mut out = Vec::new();
    let mut mask = vec![false; total];
    fn rec(mask: &mut Vec<bool>, pos: usize, left: usize, out: &mut Vec<Shuffle>, n: usize, m: usize) {
        if pos == mask.len() {
            if left == n {
                out.push(Shuffle::from_mask(n, m, mask.clone()));
            }
            return;
        }
        if mask.len() - pos >= 1 {
            mask[pos] = true;
            if left < n {
                rec(mask, pos + 1, left + 1, out, n, m);
            }
            mask[pos] = false;
            rec(mask, pos + 1, left, out, n, m);
        }
    }
    rec(&mut mask, 0, 0, &mut out, n, m);
    out.sort_by(|a, b| b.mask.cmp(&a.mask));
    out
}

/// Koszul sign of the permutation `perm` acting on letters with the given
/// degrees: `perm[i]` is the source index of the letter placed at output
/// position `i`.  The sign is `(-1)` for each transposition of two
/// odd-degree letters, i.e. `(-1)^{sum over inverted pairs of deg_i deg_j}`.
pub fn koszul_sign_of_permutation(perm: &[usize], degrees: &[usize]) -> i32 {
    assert_eq!(perm.len(), degrees.len());
    let mut sign = 1i32;
    for i in 0..perm.len() {
        for j in (i + 1)..perm.len() {
            if perm[i] > perm[j] {
                // letters perm[j] and perm[i] cross
                if degrees[perm[i]] % 2 == 1 && degrees[perm[j]] % 2 == 1 {
                    sign = -sign;
                }
            }
        }
    }
    sign
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shuffle_count_is_binomial() {
        assert_eq!(enumerate_shuffles(2, 2).len(), 6);
        assert_eq!(enumerate_shuffles(3, 2).len(), 10);
        assert_eq!(enumerate_shuffles(0, 3).len(), 1);
    }

    #[test]
    fn inversion_parity_small_cases() {
        // mask TF: identity on (1,1), 0 inversions; FT: one inversion.
        let id = Shuffle::from_mask(1, 1, vec![true, false]);
        let sw = Shuffle::from_mask(1, 1, vec![false, true]);
        assert_eq!(id.inversions(), 0);
        assert_eq!(sw.inversions(), 1);
        assert_eq!(sw.sign(), -1);
    }

    #[test]
    fn reversal_sign_relation() {
        // sgn(sigma^rev) = (-1)^{n m} sgn(sigma)
        for (n, m) in [(1usize, 1usize), (2, 1), (2, 2), (3, 2)] {
            for s in enumerate_shuffles(n, m) {
                let r = s.reversed();
                let expect = if (n * m) % 2 == 0 { s.sign() } else { -s.sign() };
                assert_eq!(r.sign(), expect, "n={} m={} mask={:?}", n, m, s.mask());
            }
        }
    }

    #[test]
    fn interleave_preserves_blocks() {
        let s = Shuffle::from_mask(2, 2, vec![true, false, false, true]);
        let v = s.interleave(&["a", "b"], &["x", "y"]);
        assert_eq!(v, vec!["a", "x", "y", "b"]);
    }

    #[test]
    fn koszul_sign_swap_of_odds() {
        // swapping two odd letters: -1 ; odd past even: +1
        assert_eq!(koszul_sign_of_permutation(&[1, 0], &[1, 1]), -1);
        assert_eq!(koszul_sign_of_permutation(&[1, 0], &[1, 2]), 1);
        assert_eq!(koszul_sign_of_permutation(&[2, 0, 1], &[1, 1, 1]), 1);
    }
}
