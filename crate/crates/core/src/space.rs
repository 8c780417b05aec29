//! Tuple encoding and subuniverse generation shared by algebras and their
//! powers.

/// Bijection between `arity`-tuples over `0..size` and `0..size^arity`,
/// first component most significant. Numeric order is lexicographic order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TupleCodec {
    size: usize,
    arity: usize,
    len: usize,
}

impl TupleCodec {
    pub fn new(size: usize, arity: usize) -> TupleCodec {
        let len = crate::algebra::checked_pow(size, arity).expect("tuple space overflows usize");
        TupleCodec { size, arity, len }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Number of tuples.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn encode(&self, tuple: &[usize]) -> usize {
        debug_assert_eq!(tuple.len(), self.arity);
        crate::algebra::table_index(self.size, tuple)
    }

    #[inline]
    pub fn decode_into(&self, mut code: usize, out: &mut [usize]) {
        for slot in out.iter_mut().rev() {
            *slot = code % self.size;
            code /= self.size;
        }
    }

    pub fn decode(&self, code: usize) -> Vec<usize> {
        let mut out = vec![0; self.arity];
        self.decode_into(code, &mut out);
        out
    }
}

/// A finite set of points with operations, e.g. an algebra or a power of one.
pub(crate) trait Space {
    fn points(&self) -> usize;
    fn arities(&self) -> Vec<usize>;
    fn apply(&self, op: usize, args: &[usize]) -> usize;
}

/// Calls `f` on every tuple whose `j`-th entry ranges over `0..ranges[j]`,
/// in lexicographic order.
pub(crate) fn for_each_mixed<F: FnMut(&[usize])>(ranges: &[usize], mut f: F) {
    if ranges.contains(&0) {
        return;
    }
    let mut digits = vec![0; ranges.len()];
    loop {
        f(&digits);
        let mut pos = digits.len();
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < ranges[pos] {
                break;
            }
            digits[pos] = 0;
        }
    }
}

/// The first tuple (in the order of [`for_each_mixed`]) satisfying `pred`.
pub(crate) fn find_mixed<F: FnMut(&[usize]) -> bool>(ranges: &[usize], mut pred: F) -> Option<Vec<usize>> {
    if ranges.contains(&0) {
        return None;
    }
    let mut digits = vec![0; ranges.len()];
    loop {
        if pred(&digits) {
            return Some(digits);
        }
        let mut pos = digits.len();
        loop {
            if pos == 0 {
                return None;
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < ranges[pos] {
                break;
            }
            digits[pos] = 0;
        }
    }
}

/// Generates the subuniverse of `space` containing `closed` and `extra`.
///
/// `closed` must already be closed under every operation; only tuples that
/// involve at least one new point are evaluated. Returns the members in
/// discovery order, `closed` first.
pub(crate) fn generate<S: Space + ?Sized>(space: &S, closed: &[usize], extra: &[usize]) -> Vec<usize> {
    let mut present = vec![false; space.points()];
    let mut members: Vec<usize> = Vec::with_capacity(closed.len() + extra.len());
    let push = |p: usize, members: &mut Vec<usize>, present: &mut Vec<bool>| {
        if !present[p] {
            present[p] = true;
            members.push(p);
        }
    };
    for &p in closed {
        push(p, &mut members, &mut present);
    }
    let mut processed = members.len();
    let arities = space.arities();
    if closed.is_empty() {
        for (op, &m) in arities.iter().enumerate() {
            if m == 0 {
                let c = space.apply(op, &[]);
                push(c, &mut members, &mut present);
            }
        }
    }
    for &p in extra {
        push(p, &mut members, &mut present);
    }

    let mut args = Vec::new();
    let mut ranges = Vec::new();
    while processed < members.len() {
        let i = processed;
        for (op, &m) in arities.iter().enumerate() {
            // first occurrence of member i at position `first`
            for first in 0..m {
                ranges.clear();
                ranges.extend((0..m).map(|j| match j.cmp(&first) {
                    std::cmp::Ordering::Less => i,
                    std::cmp::Ordering::Equal => 1,
                    std::cmp::Ordering::Greater => i + 1,
                }));
                let mut found = Vec::new();
                for_each_mixed(&ranges, |digits| {
                    args.clear();
                    args.extend(digits.iter().enumerate().map(
                        |(j, &d)| {
                            if j == first {
                                members[i]
                            } else {
                                members[d]
                            }
                        },
                    ));
                    let out = space.apply(op, &args);
                    if !present[out] {
                        found.push(out);
                    }
                });
                for p in found {
                    push(p, &mut members, &mut present);
                }
            }
        }
        processed += 1;
    }
    members
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codec_round_trip_and_order() {
        let codec = TupleCodec::new(3, 2);
        assert_eq!(codec.len(), 9);
        assert_eq!(codec.encode(&[2, 1]), 7);
        assert_eq!(codec.decode(7), vec![2, 1]);
        let decoded: Vec<_> = (0..codec.len()).map(|c| codec.decode(c)).collect();
        let mut sorted = decoded.clone();
        sorted.sort();
        assert_eq!(decoded, sorted);
    }

    #[test]
    fn mixed_ranges() {
        let mut seen = Vec::new();
        for_each_mixed(&[2, 1, 3], |d| seen.push(d.to_vec()));
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[0], vec![0, 0, 0]);
        assert_eq!(seen[5], vec![1, 0, 2]);
        let mut none = 0;
        for_each_mixed(&[2, 0], |_| none += 1);
        assert_eq!(none, 0);
        let mut empty = 0;
        for_each_mixed(&[], |_| empty += 1);
        assert_eq!(empty, 1);
    }
}
