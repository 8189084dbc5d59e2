//! Permutations and the SE(n) / SO(k, n) enumerations.

use std::fmt;

use crate::error::{Error, Result};

/// Largest `n` accepted by the enumerators.
pub const MAX_ENUM: usize = 10;

/// Bijection of `{0, …, n−1}`; `image[i]` is the image of `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation { image: (0..n).collect() }
    }

    pub fn new(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &v in &image {
            if v >= n || seen[v] {
                return Err(Error::InvalidArgument(format!("{image:?} is not a permutation")));
            }
            seen[v] = true;
        }
        Ok(Permutation { image })
    }

    /// From the 1-based image notation `[σ(1), …, σ(n)]`.
    pub fn from_one_based(image: &[usize]) -> Result<Self> {
        if image.contains(&0) {
            return Err(Error::InvalidArgument("1-based permutation contains 0".into()));
        }
        Self::new(image.iter().map(|v| v - 1).collect())
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.image.iter().map(|v| v + 1).collect()
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn apply(&self, i: usize) -> usize {
        self.image[i]
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// `self ∘ other`, i.e. `i ↦ self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.len(), other.len());
        Permutation { image: other.image.iter().map(|&i| self.image[i]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &v) in self.image.iter().enumerate() {
            inv[v] = i;
        }
        Permutation { image: inv }
    }

    /// `+1` for even permutations, `−1` for odd ones.
    pub fn parity(&self) -> i32 {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut transpositions = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.image[i];
                len += 1;
            }
            transpositions += len - 1;
        }
        if transpositions % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Embeds into `{0, …, n+m−1}`, acting as the identity shifted by `offset` outside.
    pub(crate) fn shifted(&self, offset: usize) -> Vec<usize> {
        self.image.iter().map(|v| v + offset).collect()
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, v) in self.image.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", v + 1)?;
        }
        write!(f, "]")
    }
}

fn guard(n: usize) -> Result<()> {
    if n > MAX_ENUM {
        Err(Error::TooLarge { n, max: MAX_ENUM })
    } else {
        Ok(())
    }
}

/// All permutations of `n` symbols in lexicographic order.
pub fn gen_s(n: usize) -> Result<Vec<Permutation>> {
    guard(n)?;
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(Permutation { image: cur.clone() });
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else { break };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    Ok(out)
}

/// Symbol of an SE word: the function value `y` or the direction `h_m` (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SeSym {
    Y,
    H(usize),
}

pub type SeWord = Vec<SeSym>;

pub fn word_to_string(w: &[SeSym]) -> String {
    w.iter()
        .map(|s| match s {
            SeSym::Y => "y".to_string(),
            SeSym::H(m) => format!("h{m}"),
        })
        .collect()
}

fn y_pos(w: &[SeSym]) -> usize {
    w.iter().position(|s| *s == SeSym::Y).expect("SE word contains y")
}

/// Puts `h_m` immediately before `y`.
pub fn insert_before(w: &[SeSym], m: usize) -> SeWord {
    let mut out = w.to_vec();
    out.insert(y_pos(w), SeSym::H(m));
    out
}

/// Puts `h_m` immediately after `y`.
pub fn insert_after(w: &[SeSym], m: usize) -> SeWord {
    let mut out = w.to_vec();
    out.insert(y_pos(w) + 1, SeSym::H(m));
    out
}

/// SE(n), built by repeatedly inserting the next direction next to `y` on either side.
pub fn gen_se(n: usize) -> Result<Vec<SeWord>> {
    guard(n)?;
    let mut words = vec![vec![SeSym::Y]];
    for m in 1..=n {
        words = words.iter().flat_map(|w| [insert_before(w, m), insert_after(w, m)]).collect();
    }
    Ok(words)
}

/// Whether `w` is an arrangement of `y, h_1 … h_n` in which, on both sides of `y`,
/// a larger index sits closer to `y`.
pub fn is_se_word(w: &[SeSym], n: usize) -> bool {
    if w.len() != n + 1 {
        return false;
    }
    let mut seen = vec![false; n + 1];
    let mut ys = 0;
    for s in w {
        match *s {
            SeSym::Y => ys += 1,
            SeSym::H(m) if (1..=n).contains(&m) && !seen[m] => seen[m] = true,
            _ => return false,
        }
    }
    if ys != 1 {
        return false;
    }
    let p = y_pos(w);
    let idx = |s: &SeSym| match s {
        SeSym::H(m) => *m,
        SeSym::Y => unreachable!(),
    };
    let left: Vec<usize> = w[..p].iter().map(idx).collect();
    let right: Vec<usize> = w[p + 1..].iter().map(idx).collect();
    left.windows(2).all(|x| x[0] < x[1]) && right.windows(2).all(|x| x[0] > x[1])
}

/// SE(n) by filtering all `(n+1)!` arrangements with [`is_se_word`].
pub fn se_by_filter(n: usize) -> Result<Vec<SeWord>> {
    guard(n + 1)?;
    let symbols: Vec<SeSym> = std::iter::once(SeSym::Y).chain((1..=n).map(SeSym::H)).collect();
    let mut out: Vec<SeWord> = gen_s(n + 1)?
        .into_iter()
        .map(|p| p.image().iter().map(|&i| symbols[i]).collect::<SeWord>())
        .filter(|w| is_se_word(w, n))
        .collect();
    out.sort();
    Ok(out)
}

/// A placement of `k` differentiation slots `h_1 … h_k` among `n` factor positions;
/// `positions[j]` is the position of `h_{j+1}`. Unchosen positions keep `x` in order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SoPlacement {
    pub n: usize,
    pub positions: Vec<usize>,
}

impl SoPlacement {
    /// As a permutation of `n` labels: `h_j ↦ j−1`, and the `x` factors take
    /// labels `k, k+1, …` left to right.
    pub fn to_permutation(&self) -> Permutation {
        let k = self.positions.len();
        let mut image = vec![usize::MAX; self.n];
        for (j, &p) in self.positions.iter().enumerate() {
            image[p] = j;
        }
        let mut next = k;
        for v in image.iter_mut() {
            if *v == usize::MAX {
                *v = next;
                next += 1;
            }
        }
        Permutation { image }
    }

    /// Chosen positions sorted left to right, paired with the direction index placed there.
    pub fn slots_in_order(&self) -> Vec<(usize, usize)> {
        let mut v: Vec<(usize, usize)> = self.positions.iter().enumerate().map(|(j, &p)| (p, j)).collect();
        v.sort();
        v
    }
}

/// SO(k, n): all ordered placements of `k` distinct directions among `n` positions.
pub fn gen_so(k: usize, n: usize) -> Result<Vec<SoPlacement>> {
    guard(n)?;
    if k > n {
        return Err(Error::InvalidArgument(format!("SO({k}, {n}) needs k ≤ n")));
    }
    Ok(enumerate_so(k, n))
}

pub(crate) fn enumerate_so(k: usize, n: usize) -> Vec<SoPlacement> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(k: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<SoPlacement>) {
        if cur.len() == k {
            out.push(SoPlacement { n, positions: cur.clone() });
            return;
        }
        for p in 0..n {
            if !cur.contains(&p) {
                cur.push(p);
                rec(k, n, cur, out);
                cur.pop();
            }
        }
    }
    rec(k, n, &mut cur, &mut out);
    out
}

/// SO(k, n) by filtering S(n) for permutations that keep the `x` labels in order.
pub fn so_by_filter(k: usize, n: usize) -> Result<Vec<Permutation>> {
    Ok(gen_s(n)?
        .into_iter()
        .filter(|p| {
            let xs: Vec<usize> = p.image().iter().copied().filter(|&v| v >= k).collect();
            xs.windows(2).all(|w| w[0] < w[1])
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fact(n: usize) -> usize {
        (1..=n).product()
    }

    #[test]
    fn s_counts_and_parity() {
        for n in 0..=6 {
            let all = gen_s(n).unwrap();
            assert_eq!(all.len(), fact(n));
            let even = all.iter().filter(|p| p.parity() == 1).count();
            if n >= 2 {
                assert_eq!(even * 2, all.len());
            }
        }
        assert_eq!(Permutation::new(vec![1, 0, 2]).unwrap().parity(), -1);
        assert_eq!(Permutation::new(vec![1, 2, 0]).unwrap().parity(), 1);
        assert!(gen_s(11).is_err());
    }

    #[test]
    fn compose_inverse() {
        let p = Permutation::new(vec![2, 0, 1, 3]).unwrap();
        assert!(p.compose(&p.inverse()).is_identity());
        let q = Permutation::new(vec![1, 0, 3, 2]).unwrap();
        assert_eq!(p.compose(&q).parity(), p.parity() * q.parity());
    }

    #[test]
    fn se_two() {
        use SeSym::*;
        let mut got = gen_se(2).unwrap();
        got.sort();
        let mut want = vec![vec![H(2), Y, H(1)], vec![Y, H(2), H(1)], vec![H(1), H(2), Y], vec![H(1), Y, H(2)]];
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn se_matches_filter() {
        for n in 0..=6 {
            let mut a = gen_se(n).unwrap();
            a.sort();
            assert_eq!(a.len(), 1 << n);
            assert_eq!(a, se_by_filter(n).unwrap());
        }
    }

    #[test]
    fn so_counts() {
        for n in 1..=6 {
            assert_eq!(gen_so(1, n).unwrap().len(), n);
            for k in 0..=n {
                let so = gen_so(k, n).unwrap();
                assert_eq!(so.len(), fact(n) / fact(n - k));
                let mut perms: Vec<_> = so.iter().map(|p| p.to_permutation()).collect();
                perms.sort();
                let mut brute = so_by_filter(k, n).unwrap();
                brute.sort();
                assert_eq!(perms, brute);
            }
        }
    }
}
