//! Small shared numerical helpers: determinants, pairwise summation,
//! permutation enumeration and log-log slope fits.

/// Euclidean distance between two points.
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Determinant of a dense square matrix given in row-major order.
///
/// Gaussian elimination with partial pivoting; the matrices here are tiny
/// (edge-vector matrices of a simplex), so no factorization is reused.
pub fn det(rows: &[Vec<f64>]) -> f64 {
    let n = rows.len();
    debug_assert!(rows.iter().all(|r| r.len() == n));
    if n == 0 {
        return 1.0;
    }
    let mut m: Vec<Vec<f64>> = rows.to_vec();
    let mut sign = 1.0;
    let mut result = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| m[a][col].abs().partial_cmp(&m[b][col].abs()).unwrap())
            .unwrap();
        if m[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            m.swap(pivot, col);
            sign = -sign;
        }
        result *= m[col][col];
        for row in col + 1..n {
            let factor = m[row][col] / m[col][col];
            for k in col..n {
                m[row][k] -= factor * m[col][k];
            }
        }
    }
    sign * result
}

/// Signed determinant of the edge vectors `p[i] - p[0]`, `i = 1..n`.
///
/// Requires `n` points of dimension `n - 1 + 1`, i.e. a full-dimensional
/// simplex; callers with ambient dimension larger than the simplex dimension
/// want [`gram_volume`] instead.
pub fn edge_det(points: &[&[f64]]) -> f64 {
    let n = points.len() - 1;
    let rows: Vec<Vec<f64>> = (1..=n)
        .map(|i| {
            points[i]
                .iter()
                .zip(points[0])
                .map(|(a, b)| a - b)
                .collect()
        })
        .collect();
    det(&rows)
}

/// Unsigned `n`-volume of the simplex spanned by `n + 1` points in any
/// ambient dimension: `sqrt(det(E^T E)) / n!` with `E` the edge matrix.
pub fn gram_volume(points: &[&[f64]]) -> f64 {
    let n = points.len() - 1;
    if n == 0 {
        return 1.0;
    }
    let edges: Vec<Vec<f64>> = (1..=n)
        .map(|i| {
            points[i]
                .iter()
                .zip(points[0])
                .map(|(a, b)| a - b)
                .collect()
        })
        .collect();
    let gram: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| edges[i].iter().zip(&edges[j]).map(|(a, b)| a * b).sum())
                .collect()
        })
        .collect();
    let g = det(&gram);
    if g <= 0.0 {
        return 0.0;
    }
    g.sqrt() / factorial(n) as f64
}

/// `n!` as a `u64`; panics above 20.
pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// All permutations of `0..n` together with their signs, in a deterministic
/// order (Heap's algorithm). `n` is tiny here, at most simplex dimension + 1.
pub fn permutations_with_sign(n: usize) -> Vec<(Vec<usize>, i8)> {
    let mut items: Vec<usize> = (0..n).collect();
    let mut out = Vec::with_capacity(factorial(n) as usize);
    let mut c = vec![0usize; n];
    let mut sign = 1i8;
    out.push((items.clone(), sign));
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                items.swap(0, i);
            } else {
                items.swap(c[i], i);
            }
            sign = -sign;
            out.push((items.clone(), sign));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// Parity of the permutation sorting `tuple` ascending: `+1` even, `-1` odd.
pub fn sort_parity(tuple: &[usize]) -> i8 {
    let mut v = tuple.to_vec();
    let mut sign = 1i8;
    for i in 0..v.len() {
        for j in (i + 1..v.len()).rev() {
            if v[j - 1] > v[j] {
                v.swap(j - 1, j);
                sign = -sign;
            }
        }
    }
    sign
}

/// Pairwise (tree) summation: deterministic for a fixed input order and more
/// accurate than naive left-to-right accumulation on long sums.
pub fn tree_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let mid = n / 2;
            tree_sum(&values[..mid]) + tree_sum(&values[mid..])
        }
    }
}

/// Worker count for embarrassingly parallel loops: the `PAIRFORM_THREADS`
/// environment variable when set, otherwise the available parallelism.
pub fn worker_count() -> usize {
    std::env::var("PAIRFORM_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
        .max(1)
}

/// Evaluates `f(0..n)` into an index-ordered vector, chunked over scoped
/// threads. Each slot is computed independently and reductions happen on the
/// ordered output, so results are identical for any worker count.
pub fn parallel_collect<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let threads = worker_count();
    if threads <= 1 || n < 2 * threads {
        return (0..n).map(f).collect();
    }
    let chunk_len = n.div_ceil(threads);
    let mut out: Vec<Option<T>> = (0..n).map(|_| None).collect();
    std::thread::scope(|scope| {
        for (t, chunk) in out.chunks_mut(chunk_len).enumerate() {
            let f = &f;
            scope.spawn(move || {
                for (i, slot) in chunk.iter_mut().enumerate() {
                    *slot = Some(f(t * chunk_len + i));
                }
            });
        }
    });
    out.into_iter().map(|o| o.expect("all slots filled")).collect()
}

/// Least-squares slope of `ln(y)` against `ln(x)`.
///
/// Pairs with a nonpositive coordinate are skipped; returns `None` if fewer
/// than two usable pairs remain.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(&x, &y)| x > 0.0 && y > 0.0)
        .map(|(&x, &y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return None;
    }
    Some((n * sxy - sx * sy) / denom)
}
