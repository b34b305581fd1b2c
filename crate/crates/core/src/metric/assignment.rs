//! Minimum-cost perfect assignment on a square integer cost matrix.
//!
//! Shortest augmenting path Hungarian method, `O(m^3)`. Among all optimal
//! assignments the lexicographically smallest one is returned: with an
//! optimal dual in hand, optimal assignments are exactly the perfect
//! matchings of the zero-reduced-cost subgraph, and the lexicographic
//! minimum is extracted from that subgraph one row at a time.

/// Returns `(cost, assignment)` where `assignment[row] = column`.
pub fn min_cost_assignment(cost: &[Vec<i128>]) -> (i128, Vec<usize>) {
    let n = cost.len();
    if n == 0 {
        return (0, Vec::new());
    }
    debug_assert!(cost.iter().all(|r| r.len() == n));

    // 1-based arrays with a virtual column 0, following the classic layout.
    let inf = i128::MAX / 4;
    let mut u = vec![0i128; n + 1];
    let mut v = vec![0i128; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for row in 1..=n {
        owner[0] = row;
        let mut j0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut row_to_col = vec![0usize; n];
    for j in 1..=n {
        row_to_col[owner[j] - 1] = j - 1;
    }
    let tight: Vec<Vec<bool>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| cost[i][j] - u[i + 1] - v[j + 1] == 0)
                .collect()
        })
        .collect();
    debug_assert!((0..n).all(|i| tight[i][row_to_col[i]]));

    let assignment = lexicographic_min_matching(&tight, row_to_col);
    let total = assignment
        .iter()
        .enumerate()
        .map(|(i, &j)| cost[i][j])
        .sum();
    (total, assignment)
}

/// Lexicographically smallest perfect matching of the bipartite graph
/// `allowed`, starting from any perfect matching `matching`.
fn lexicographic_min_matching(allowed: &[Vec<bool>], mut matching: Vec<usize>) -> Vec<usize> {
    let n = matching.len();
    let mut col_owner = vec![0usize; n];
    for (i, &j) in matching.iter().enumerate() {
        col_owner[j] = i;
    }
    let mut col_fixed = vec![false; n];
    for row in 0..n {
        for col in 0..n {
            if col_fixed[col] || !allowed[row][col] {
                continue;
            }
            if matching[row] == col {
                break;
            }
            // Give `col` to `row`; its current owner must reach the freed column.
            let displaced = col_owner[col];
            let freed = matching[row];
            if let Some(path) = alternating_path(
                allowed, &matching, &col_owner, &col_fixed, row, col, displaced, freed,
            ) {
                for (r, c) in path {
                    matching[r] = c;
                    col_owner[c] = r;
                }
                matching[row] = col;
                col_owner[col] = row;
                break;
            }
        }
        col_fixed[matching[row]] = true;
    }
    matching
}

/// BFS for an alternating path from row `start` to column `target` that
/// avoids fixed columns and `blocked`. Returns the new (row, column) pairs.
#[allow(clippy::too_many_arguments)]
fn alternating_path(
    allowed: &[Vec<bool>],
    matching: &[usize],
    col_owner: &[usize],
    col_fixed: &[bool],
    skip_row: usize,
    blocked: usize,
    start: usize,
    target: usize,
) -> Option<Vec<(usize, usize)>> {
    let n = matching.len();
    // parent[col] = row that reached `col`.
    let mut parent = vec![usize::MAX; n];
    let mut queue = std::collections::VecDeque::from([start]);
    let mut seen_row = vec![false; n];
    seen_row[start] = true;
    while let Some(r) = queue.pop_front() {
        for c in 0..n {
            if !allowed[r][c] || col_fixed[c] || c == blocked || parent[c] != usize::MAX {
                continue;
            }
            parent[c] = r;
            if c == target {
                let mut path = Vec::new();
                let mut c = c;
                loop {
                    let r = parent[c];
                    path.push((r, c));
                    if r == start {
                        return Some(path);
                    }
                    c = matching[r];
                }
            }
            let next = col_owner[c];
            if next != skip_row && !seen_row[next] {
                seen_row[next] = true;
                queue.push_back(next);
            }
        }
    }
    None
}
