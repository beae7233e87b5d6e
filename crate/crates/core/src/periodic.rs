//! Canonical forms for eventually periodic sequences `pre · per · per · …`.
//!
//! Both Laurent series digits and boundary points of the tree are stored this way; the
//! canonical form (shortest period, then shortest preperiod) makes equality structural.

/// Length of the shortest block whose repetition gives `per` (a divisor of `per.len()`).
pub fn primitive_root_len<T: Eq>(per: &[T]) -> usize {
    let n = per.len();
    if n == 0 {
        return 0;
    }
    // KMP failure function: fail[i] = length of the longest proper border of per[..=i].
    let mut fail = vec![0usize; n];
    let mut k = 0;
    for i in 1..n {
        while k > 0 && per[i] != per[k] {
            k = fail[k - 1];
        }
        if per[i] == per[k] {
            k += 1;
        }
        fail[i] = k;
    }
    let candidate = n - fail[n - 1];
    if n.is_multiple_of(candidate) {
        candidate
    } else {
        n
    }
}

/// Rewrites `pre · per^ω` with the shortest period and then the shortest preperiod.
///
/// Panics if `per` is empty.
pub fn canonicalize<T: Eq + Clone>(mut pre: Vec<T>, mut per: Vec<T>) -> (Vec<T>, Vec<T>) {
    assert!(!per.is_empty(), "period must be non-empty");
    let root = primitive_root_len(&per);
    per.truncate(root);
    while let (Some(a), Some(b)) = (pre.last(), per.last()) {
        if a != b {
            break;
        }
        pre.pop();
        per.rotate_right(1);
    }
    (pre, per)
}

/// The `i`-th entry of `pre · per^ω`.
pub fn nth<T: Clone>(pre: &[T], per: &[T], i: usize) -> T {
    if i < pre.len() {
        pre[i].clone()
    } else {
        per[(i - pre.len()) % per.len()].clone()
    }
}

/// The suffix of `pre · per^ω` starting at index `start`, as a (pre, per) pair.
pub fn suffix<T: Clone>(pre: &[T], per: &[T], start: usize) -> (Vec<T>, Vec<T>) {
    if start <= pre.len() {
        (pre[start..].to_vec(), per.to_vec())
    } else {
        let mut p = per.to_vec();
        p.rotate_left((start - pre.len()) % per.len());
        (Vec::new(), p)
    }
}
