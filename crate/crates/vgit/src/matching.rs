//! Maximum-weight choice of pairwise-distinct items, one per slot.
//!
//! Slot `i` may only take items from its own list. Small slot counts are
//! searched exhaustively; larger ones go through the Hungarian method on
//! the slots × items cost matrix.

/// `slots[i]` lists `(item, weight)` pairs. Returns the best total or
/// `None` when no assignment of distinct items exists.
pub fn max_distinct_sum(slots: &[Vec<(usize, i64)>]) -> Option<i64> {
    match slots.len() {
        0 => Some(0),
        1 => slots[0].iter().map(|x| x.1).max(),
        2 => best_pair(&slots[0], &slots[1]),
        3 => exhaustive(slots),
        _ => hungarian(slots),
    }
}

fn top_two(s: &[(usize, i64)]) -> (Option<(usize, i64)>, Option<(usize, i64)>) {
    let mut a: Option<(usize, i64)> = None;
    let mut b: Option<(usize, i64)> = None;
    for &x in s {
        if a.is_none_or(|y| x.1 > y.1) {
            b = a;
            a = Some(x);
        } else if b.is_none_or(|y| x.1 > y.1) {
            b = Some(x);
        }
    }
    (a, b)
}

fn best_pair(s: &[(usize, i64)], t: &[(usize, i64)]) -> Option<i64> {
    let (a1, a2) = top_two(s);
    let (b1, b2) = top_two(t);
    let (a1, b1) = (a1?, b1?);
    if a1.0 != b1.0 {
        return Some(a1.1 + b1.1);
    }
    let x = a2.map(|a| a.1 + b1.1);
    let y = b2.map(|b| a1.1 + b.1);
    match (x, y) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, y) => x.or(y),
    }
}

fn exhaustive(slots: &[Vec<(usize, i64)>]) -> Option<i64> {
    fn go(slots: &[Vec<(usize, i64)>], used: &mut Vec<usize>, acc: i64, best: &mut Option<i64>) {
        let Some((first, rest)) = slots.split_first() else {
            *best = Some(best.map_or(acc, |b| b.max(acc)));
            return;
        };
        for &(item, w) in first {
            if used.contains(&item) {
                continue;
            }
            used.push(item);
            go(rest, used, acc + w, best);
            used.pop();
        }
    }
    let mut best = None;
    go(slots, &mut Vec::new(), 0, &mut best);
    best
}

fn hungarian(slots: &[Vec<(usize, i64)>]) -> Option<i64> {
    let mut items: Vec<usize> = slots.iter().flatten().map(|x| x.0).collect();
    items.sort_unstable();
    items.dedup();
    let n = slots.len();
    let m = items.len();
    if m < n {
        return None;
    }
    const BIG: i64 = 1 << 40;
    let mut cost = vec![vec![BIG; m + 1]; n + 1];
    for (i, s) in slots.iter().enumerate() {
        for &(item, w) in s {
            let j = items.binary_search(&item).unwrap();
            cost[i + 1][j + 1] = cost[i + 1][j + 1].min(-w);
        }
    }
    // Potentials-based Hungarian, rows ≤ columns, 1-indexed.
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![i64::MAX; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = i64::MAX;
            let mut j1 = 0;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = cost[i0][j] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut total = 0i64;
    for j in 1..=m {
        if p[j] != 0 {
            let c = cost[p[j]][j];
            if c >= BIG {
                return None;
            }
            total -= c;
        }
    }
    Some(total)
}
