//! Line diff (longest common subsequence) for showing tactic results.

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiffLine {
    Same(String),
    Removed(String),
    Added(String),
}

pub fn diff_lines(a: &str, b: &str) -> Vec<DiffLine> {
    let (xs, ys): (Vec<&str>, Vec<&str>) = (a.lines().collect(), b.lines().collect());
    let (n, m) = (xs.len(), ys.len());
    // lcs[i][j]: common subsequence length of xs[i..] and ys[j..]
    let mut lcs = vec![vec![0usize; m + 1]; n + 1];
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            lcs[i][j] = if xs[i] == ys[j] { lcs[i + 1][j + 1] + 1 } else { lcs[i + 1][j].max(lcs[i][j + 1]) };
        }
    }
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < n || j < m {
        if i < n && j < m && xs[i] == ys[j] {
            out.push(DiffLine::Same(xs[i].into()));
            i += 1;
            j += 1;
        } else if i < n && (j == m || lcs[i + 1][j] >= lcs[i][j + 1]) {
            out.push(DiffLine::Removed(xs[i].into()));
            i += 1;
        } else {
            out.push(DiffLine::Added(ys[j].into()));
            j += 1;
        }
    }
    out
}

/// `-`/`+` prefixed changed lines with a space-prefixed line of context
/// either side; unchanged stretches collapse to `...`.
pub fn render_diff(a: &str, b: &str) -> String {
    let d = diff_lines(a, b);
    let changed = |k: usize| d.get(k).is_some_and(|l| !matches!(l, DiffLine::Same(_)));
    let mut out = String::new();
    let mut skipped = false;
    for (k, l) in d.iter().enumerate() {
        let near = changed(k) || changed(k + 1) || (k > 0 && changed(k - 1));
        if !near {
            if !skipped {
                out.push_str("...\n");
                skipped = true;
            }
            continue;
        }
        skipped = false;
        match l {
            DiffLine::Same(s) => out.push_str(&format!(" {s}\n")),
            DiffLine::Removed(s) => out.push_str(&format!("-{s}\n")),
            DiffLine::Added(s) => out.push_str(&format!("+{s}\n")),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insertion_in_the_middle() {
        let d = diff_lines("a\nb\nc\n", "a\nx\nb\nc\n");
        assert_eq!(d[1], DiffLine::Added("x".into()));
        assert_eq!(d.iter().filter(|l| matches!(l, DiffLine::Same(_))).count(), 3);
        assert_eq!(render_diff("a\nb\nc\nd\n", "a\nb\nC\nd\n"), "...\n b\n-c\n+C\n d\n");
    }

    #[test]
    fn identical_texts_have_no_changes() {
        assert!(diff_lines("p\nq", "p\nq").iter().all(|l| matches!(l, DiffLine::Same(_))));
    }
}
