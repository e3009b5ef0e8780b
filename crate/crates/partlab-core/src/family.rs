//! Partition families and their enumeration.
//!
//! | tag | members | dual group `G(A)` |
//! |-----|---------|-------------------|
//! | `S` | permutations `{i, σ(i)'}` | unitary `U(N)` |
//! | `B` | all blocks of size 2 | orthogonal `O(N)` |
//! | `H` | all blocks of even size | hyperoctahedral `H(N)` |
//! | `Bs` | all blocks of size ≤ 2 | bistochastic orthogonal `B(N)` |
//! | `P` | everything | symmetric `S(N)` |

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::partition::Partition;

/// A family `A ∈ {P, B, S, H, Bs}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FamilyTag {
    P,
    B,
    S,
    H,
    Bs,
}

impl FamilyTag {
    pub const ALL: [FamilyTag; 5] = [
        FamilyTag::P,
        FamilyTag::B,
        FamilyTag::S,
        FamilyTag::H,
        FamilyTag::Bs,
    ];

    /// Membership predicate.
    pub fn contains(self, p: &Partition) -> bool {
        match self {
            FamilyTag::P => true,
            FamilyTag::S => p.as_permutation().is_some(),
            FamilyTag::B => block_sizes(p).iter().all(|&s| s == 2),
            FamilyTag::H => block_sizes(p).iter().all(|&s| s % 2 == 0),
            FamilyTag::Bs => block_sizes(p).iter().all(|&s| s <= 2),
        }
    }

    /// `self ⊂ other` as families.
    pub fn is_subfamily_of(self, other: FamilyTag) -> bool {
        use FamilyTag::*;
        matches!(
            (self, other),
            (S, _) | (B, B | H | P) | (H, H | P) | (Bs, Bs | P) | (P, P)
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            FamilyTag::P => "P",
            FamilyTag::B => "B",
            FamilyTag::S => "S",
            FamilyTag::H => "H",
            FamilyTag::Bs => "Bs",
        }
    }
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "P" | "p" => Ok(FamilyTag::P),
            "B" | "b" => Ok(FamilyTag::B),
            "S" | "s" => Ok(FamilyTag::S),
            "H" | "h" => Ok(FamilyTag::H),
            "Bs" | "bs" | "BS" => Ok(FamilyTag::Bs),
            _ => Err(Error::Parse(alloc::format!("unknown family tag {s:?}"))),
        }
    }
}

fn block_sizes(p: &Partition) -> Vec<usize> {
    let mut sizes = vec![0usize; p.nc()];
    for &l in p.labels() {
        sizes[l as usize] += 1;
    }
    sizes
}

/// Enumeration caps on `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumCaps {
    /// Cap for `P` (Bell(2k) members).
    pub p: usize,
    /// Cap for `H` and `Bs`.
    pub h: usize,
    /// Cap for `S` and `B`.
    pub sb: usize,
}

impl Default for EnumCaps {
    fn default() -> Self {
        EnumCaps { p: 4, h: 5, sb: 6 }
    }
}

/// Largest `k` accepted by [`orbit_rep`] (k! conjugations).
pub const ORBIT_CAP: usize = 8;

/// All members of `A_k` in ascending canonical order, with default caps.
pub fn enumerate_family(k: usize, tag: FamilyTag) -> Result<Vec<Partition>> {
    enumerate_family_with(k, tag, EnumCaps::default())
}

pub fn enumerate_family_with(k: usize, tag: FamilyTag, caps: EnumCaps) -> Result<Vec<Partition>> {
    let cap = match tag {
        FamilyTag::P => caps.p,
        FamilyTag::H | FamilyTag::Bs => caps.h,
        FamilyTag::S | FamilyTag::B => caps.sb,
    };
    if k > cap {
        return Err(Error::Capacity {
            what: "enumeration k",
            value: k as u128,
            cap: cap as u128,
        });
    }
    let mut out = Vec::new();
    if tag == FamilyTag::S {
        for images in permutations(k) {
            out.push(Partition::from_permutation(&images)?);
        }
        out.sort();
        return Ok(out);
    }
    let max_block = match tag {
        FamilyTag::B | FamilyTag::Bs => 2,
        _ => usize::MAX,
    };
    let mut labels = Vec::with_capacity(2 * k);
    let mut sizes: Vec<usize> = Vec::new();
    grow(k, tag, max_block, &mut labels, &mut sizes, &mut out);
    Ok(out)
}

fn grow(
    k: usize,
    tag: FamilyTag,
    max_block: usize,
    labels: &mut Vec<u8>,
    sizes: &mut Vec<usize>,
    out: &mut Vec<Partition>,
) {
    let remaining = 2 * k - labels.len();
    let need = match tag {
        FamilyTag::B => sizes.iter().filter(|&&s| s == 1).count(),
        FamilyTag::H => sizes.iter().filter(|&&s| s % 2 == 1).count(),
        _ => 0,
    };
    if need > remaining {
        return;
    }
    if remaining == 0 {
        out.push(Partition::from_canonical_labels(k, labels.clone()));
        return;
    }
    for b in 0..=sizes.len() {
        if b == sizes.len() {
            sizes.push(1);
        } else if sizes[b] >= max_block {
            continue;
        } else {
            sizes[b] += 1;
        }
        labels.push(b as u8);
        grow(k, tag, max_block, labels, sizes, out);
        labels.pop();
        if sizes[b] == 1 && b == sizes.len() - 1 {
            sizes.pop();
        } else {
            sizes[b] -= 1;
        }
    }
}

/// All permutations of `1..=k` (as image vectors) in lexicographic order.
pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut cur: Vec<usize> = (1..=k).collect();
    let mut out = vec![cur.clone()];
    loop {
        let Some(i) = (1..k).rev().find(|&i| cur[i - 1] < cur[i]) else {
            break;
        };
        let j = (i..k).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(cur.clone());
    }
    out
}

/// Least element of the conjugation orbit of `p` under column relabeling.
pub fn orbit_rep(p: &Partition) -> Result<Partition> {
    check_orbit_cap(p.k())?;
    Ok(permutations(p.k())
        .iter()
        .map(|perm| p.permute_columns(perm))
        .min()
        .unwrap_or_else(Partition::empty))
}

/// Least `(partition, word)` over the joint orbit of a keyed moment.
pub fn orbit_rep_with_word<L: Ord + Clone>(p: &Partition, word: &[L]) -> Result<(Partition, Vec<L>)> {
    if word.len() != p.k() {
        return Err(Error::SizeMismatch {
            left: p.k(),
            right: word.len(),
        });
    }
    check_orbit_cap(p.k())?;
    let mut best: Option<(Partition, Vec<L>)> = None;
    for perm in permutations(p.k()) {
        let q = p.permute_columns(&perm);
        if let Some((bq, _)) = &best {
            if q > *bq {
                continue;
            }
        }
        let mut w = word.to_vec();
        for (c, &t) in perm.iter().enumerate() {
            w[t - 1] = word[c].clone();
        }
        let cand = (q, w);
        if best.as_ref().map_or(true, |b| cand < *b) {
            best = Some(cand);
        }
    }
    Ok(best.unwrap_or((Partition::empty(), Vec::new())))
}

fn check_orbit_cap(k: usize) -> Result<()> {
    if k > ORBIT_CAP {
        return Err(Error::Capacity {
            what: "orbit k",
            value: k as u128,
            cap: ORBIT_CAP as u128,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(k: usize, tag: FamilyTag) -> usize {
        enumerate_family(k, tag).unwrap().len()
    }

    #[test]
    fn small_counts() {
        assert_eq!(count(2, FamilyTag::S), 2);
        assert_eq!(count(2, FamilyTag::P), 15);
        assert_eq!(count(2, FamilyTag::B), 3);
        assert_eq!(count(2, FamilyTag::H), 4);
        assert_eq!(count(2, FamilyTag::Bs), 10);
        assert_eq!(count(0, FamilyTag::P), 1);
        assert_eq!(count(4, FamilyTag::P), 4140);
        assert_eq!(count(6, FamilyTag::S), 720);
        assert_eq!(count(6, FamilyTag::B), 10395);
    }

    #[test]
    fn cap_is_reported() {
        match enumerate_family(5, FamilyTag::P) {
            Err(Error::Capacity { cap, .. }) => assert_eq!(cap, 4),
            other => panic!("{other:?}"),
        }
        let caps = EnumCaps { p: 5, ..EnumCaps::default() };
        assert_eq!(enumerate_family_with(5, FamilyTag::P, caps).unwrap().len(), 115975);
    }

    #[test]
    fn s2_members() {
        let s = enumerate_family(2, FamilyTag::S).unwrap();
        assert!(s.contains(&Partition::identity(2)));
        assert!(s.contains(&Partition::transposition(2, 1, 2).unwrap()));
    }

    #[test]
    fn sorted_and_unique() {
        for tag in FamilyTag::ALL {
            let v = enumerate_family(3, tag).unwrap();
            assert!(v.windows(2).all(|w| w[0] < w[1]), "{tag}");
            assert!(v.iter().all(|p| tag.contains(p)));
        }
    }

    #[test]
    fn orbit_examples() {
        let a: Partition = "{2 2'}{1 1'}".parse().unwrap();
        assert_eq!(orbit_rep(&a).unwrap(), Partition::identity(2));
        let x: Partition = "{1 2 2'}{1'}".parse().unwrap();
        let y: Partition = "{2 1 1'}{2'}".parse().unwrap();
        assert_eq!(orbit_rep(&x).unwrap(), orbit_rep(&y).unwrap());
        let t = Partition::transposition(2, 1, 2).unwrap();
        let orbit: Vec<Partition> = permutations(2).iter().map(|s| t.permute_columns(s)).collect();
        assert!(orbit.iter().all(|q| *q == t));
    }

    #[test]
    fn orbit_with_word_moves_letters() {
        let x: Partition = "{1 2 2'}{1'}".parse().unwrap();
        let (q, w) = orbit_rep_with_word(&x, &['a', 'b']).unwrap();
        let (q2, w2) = orbit_rep_with_word(&x.permute_columns(&[2, 1]), &['b', 'a']).unwrap();
        assert_eq!((q, w), (q2, w2));
    }

    #[test]
    fn permutation_order() {
        assert_eq!(
            permutations(3),
            vec![
                vec![1, 2, 3],
                vec![1, 3, 2],
                vec![2, 1, 3],
                vec![2, 3, 1],
                vec![3, 1, 2],
                vec![3, 2, 1]
            ]
        );
        assert_eq!(permutations(0), vec![Vec::<usize>::new()]);
    }
}
