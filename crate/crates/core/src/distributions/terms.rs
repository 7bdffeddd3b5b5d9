//! Summation layouts of the eight run distributions.
//!
//! Every sequence of `n` trials reads uniquely as a string of tokens
//! `B^(t-1) X` (`X` in {A, C, D}), possibly interleaved with marked blocks of
//! `k` B's, followed by a trailing run of `i` B's. A support point's
//! probability is a sum of [`Term`]s, one per admissible trailing length (and
//! per layout variant), each ranging over token counts with
//! `sum_t t * m_t = target`.
//!
//! Whatever the layout, a configuration with `M` terminators contains exactly
//! `n - M` B's, so its weight is `multinomial * P_a^x P_c^y P_d^z P_b^(n - M)`.

/// One slice of a support point's sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Term {
    /// Trailing run length `i`.
    pub trailing: u64,
    /// Admissible token lengths, longest first.
    pub lengths: Vec<u64>,
    pub target: u64,
    /// Group total required at one token length.
    pub pin: Option<(u64, u64)>,
    /// Token length that must occur at least once.
    pub require: Option<u64>,
    /// Extra multinomial part for marked blocks (`x` in the binomial of order
    /// `k`, `r - 1` in the negative binomial).
    pub extra: u64,
}

impl Term {
    fn new(trailing: u64, lengths: Vec<u64>, target: u64) -> Term {
        Term {
            trailing,
            lengths,
            target,
            pin: None,
            require: None,
            extra: 0,
        }
    }

    /// Pins the total at `t`. A length that cannot fit in the target can only
    /// carry a zero pin; anything else leaves the term empty.
    fn pinned(mut self, t: u64, total: u64) -> Option<Term> {
        if self.lengths.contains(&t) {
            self.pin = Some((t, total));
            Some(self)
        } else if total == 0 {
            Some(self)
        } else {
            None
        }
    }

    fn requiring(mut self, t: u64) -> Option<Term> {
        if self.lengths.contains(&t) {
            self.require = Some(t);
            Some(self)
        } else {
            None
        }
    }
}

/// Token lengths `1..=max`, capped by the target, longest first.
fn lengths_up_to(max: u64, target: u64) -> Vec<u64> {
    (1..=max.min(target)).rev().collect()
}

/// Binomial distribution of order `k`: `P(N_n^k = x)`.
///
/// Tokens of length `1..=k`, `x` marked blocks of `k` B's, trailing `i < k`.
pub(crate) fn nonoverlapping(n: u64, k: u64, x: u64) -> Vec<Term> {
    (0..k)
        .filter(|&i| k * x + i <= n)
        .map(|i| {
            let target = n - k * x - i;
            Term {
                extra: x,
                ..Term::new(i, lengths_up_to(k, target), target)
            }
        })
        .collect()
}

/// Runs of length exactly `k`: `P(E_n^k = x)`.
///
/// Tokens of any length; the count at length `k + 1` (a run of exactly `k`
/// closed by a terminator) is pinned to `x`, or `x - 1` when the trailing run
/// itself has length `k`. Trailing lengths other than `k` are bounded by
/// `n - x(k+1)`; `i = k` is feasible whenever `x(k+1) <= n + 1`, which the
/// printed bound would cut off.
pub(crate) fn exact_length(n: u64, k: u64, x: u64) -> Vec<Term> {
    let mut trailing: Vec<u64> = match n.checked_sub(x * (k + 1)) {
        Some(top) => (0..=top).filter(|&i| i != k).collect(),
        None => Vec::new(),
    };
    if x >= 1 && k <= n {
        trailing.push(k);
    }
    trailing.sort_unstable();
    trailing
        .into_iter()
        .filter_map(|i| {
            let target = n - i;
            let pin = if i == k { x - 1 } else { x };
            Term::new(i, lengths_up_to(n, target), target).pinned(k + 1, pin)
        })
        .collect()
}

/// Negative binomial of order `k` (geometric for `r = 1`): `P(W_r^k = n)`.
///
/// Tokens of length `1..=k`, `r - 1` marked blocks, and the final block of
/// `k` B's that ends the wait.
pub(crate) fn waiting(n: u64, k: u64, r: u64) -> Vec<Term> {
    match n.checked_sub(k * r) {
        Some(target) => vec![Term {
            extra: r - 1,
            ..Term::new(0, lengths_up_to(k, target), target)
        }],
        None => Vec::new(),
    }
}

/// `P(L_n = l)`: tokens of length `1..=l+1`, trailing `i <= l`, and the
/// longest run attained by a token of length `l + 1` or by the trailing run.
pub(crate) fn longest(n: u64, l: u64) -> Vec<Term> {
    (0..=l.min(n))
        .filter_map(|i| {
            let target = n - i;
            let term = Term::new(i, lengths_up_to(l + 1, target), target);
            if i == l {
                Some(term)
            } else {
                term.requiring(l + 1)
            }
        })
        .collect()
}

/// `P(L_n = l, NL_n = x)` for `l, x >= 1`.
pub(crate) fn joint_longest(n: u64, l: u64, x: u64) -> Vec<Term> {
    let mut trailing: Vec<u64> = match n.checked_sub(x * (l + 1)) {
        Some(top) => (0..=top.min(l - 1)).collect(),
        None => Vec::new(),
    };
    if l <= n {
        trailing.push(l);
    }
    trailing
        .into_iter()
        .filter_map(|i| {
            let target = n - i;
            let pin = if i == l { x - 1 } else { x };
            Term::new(i, lengths_up_to(l + 1, target), target).pinned(l + 1, pin)
        })
        .collect()
}

/// Token lengths `{1} ∪ {s+1, ..., n}` capped by the target, longest first.
fn shortest_lengths(n: u64, s: u64, target: u64) -> Vec<u64> {
    let mut lengths: Vec<u64> = (s + 1..=n.min(target)).rev().collect();
    if target >= 1 {
        lengths.push(1);
    }
    lengths
}

/// `P(M_n = s)` for `s >= 1`: runs (tokens of length `>= s + 1`, or the
/// trailing run) are all at least `s`, and one of them equals `s`.
pub(crate) fn shortest(n: u64, s: u64) -> Vec<Term> {
    std::iter::once(0)
        .chain(s..=n)
        .filter_map(|i| {
            let target = n - i;
            let term = Term::new(i, shortest_lengths(n, s, target), target);
            if i == s {
                Some(term)
            } else {
                term.requiring(s + 1)
            }
        })
        .collect()
}

/// `P(M_n = s, NM_n = x)` for `s, x >= 1`. Trailing lengths are `0`, `s`, and
/// `s + 1 ..= n - x(s+1)`.
pub(crate) fn joint_shortest(n: u64, s: u64, x: u64) -> Vec<Term> {
    let mut trailing = vec![0];
    if s <= n {
        trailing.push(s);
    }
    if let Some(top) = n.checked_sub(x * (s + 1)) {
        trailing.extend(s + 1..=top);
    }
    trailing
        .into_iter()
        .filter_map(|i| {
            let target = n - i;
            let pin = if i == s { x - 1 } else { x };
            Term::new(i, shortest_lengths(n, s, target), target).pinned(s + 1, pin)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nonoverlapping_layout() {
        let terms = nonoverlapping(3, 2, 1);
        assert_eq!(terms.len(), 2);
        assert_eq!((terms[0].trailing, terms[0].target, terms[0].extra), (0, 1, 1));
        assert_eq!(terms[0].lengths, vec![1]);
        assert_eq!((terms[1].trailing, terms[1].target), (1, 0));
        assert!(nonoverlapping(3, 2, 2).is_empty());
    }

    #[test]
    fn exact_length_keeps_trailing_run_of_length_k() {
        // "B" alone: E_1^1 = 1 through a trailing run of length k.
        let terms = exact_length(1, 1, 1);
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].trailing, 1);
        assert_eq!(terms[0].pin, None);
        // x = 0 never uses a trailing run of length k.
        assert!(exact_length(3, 2, 0).iter().all(|t| t.trailing != 2));
    }

    #[test]
    fn longest_layout_requires_an_attaining_run() {
        let terms = longest(3, 1);
        assert_eq!(terms.len(), 2);
        assert_eq!(terms[0].require, Some(2));
        assert_eq!(terms[1].require, None);
        assert_eq!(longest(2, 0).len(), 1);
    }

    #[test]
    fn shortest_lengths_skip_short_runs() {
        assert_eq!(shortest_lengths(6, 2, 6), vec![6, 5, 4, 3, 1]);
        assert_eq!(shortest_lengths(6, 2, 0), Vec::<u64>::new());
        let terms = shortest(3, 3);
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].trailing, 3);
    }

    #[test]
    fn joint_shortest_trailing_set() {
        let trailing: Vec<u64> = joint_shortest(9, 2, 2).iter().map(|t| t.trailing).collect();
        assert_eq!(trailing, vec![0, 2, 3]);
    }
}
