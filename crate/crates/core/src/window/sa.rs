//! Suffix array by induced sorting (SA-IS) and Kasai's LCP construction.

/// Suffix array of `text` as `u32` offsets.
pub fn suffix_array(text: &[u8]) -> Vec<u32> {
    assert!(text.len() < i32::MAX as usize, "window too large for 32-bit offsets");
    let s: Vec<i32> = text.iter().map(|&b| b as i32).collect();
    sa_is(&s, 255).into_iter().map(|v| v as u32).collect()
}

fn sa_naive(s: &[i32]) -> Vec<i32> {
    let mut sa: Vec<i32> = (0..s.len() as i32).collect();
    sa.sort_by(|&a, &b| s[a as usize..].cmp(&s[b as usize..]));
    sa
}

// `upper` is the largest symbol value that may occur in `s`.
fn sa_is(s: &[i32], upper: usize) -> Vec<i32> {
    let n = s.len();
    if n < 10 {
        return sa_naive(s);
    }

    // ls[i]: suffix i is S-type
    let mut ls = vec![false; n];
    for i in (0..n - 1).rev() {
        ls[i] = if s[i] == s[i + 1] {
            ls[i + 1]
        } else {
            s[i] < s[i + 1]
        };
    }

    let mut sum_l = vec![0i32; upper + 1];
    let mut sum_s = vec![0i32; upper + 1];
    for i in 0..n {
        if !ls[i] {
            sum_s[s[i] as usize] += 1;
        } else {
            sum_l[s[i] as usize + 1] += 1;
        }
    }
    for i in 0..=upper {
        sum_s[i] += sum_l[i];
        if i < upper {
            sum_l[i + 1] += sum_s[i];
        }
    }

    let mut sa = vec![-1i32; n];
    let mut buf = vec![0i32; upper + 1];
    let induce = |sa: &mut [i32], buf: &mut [i32], lms: &[i32]| {
        sa.fill(-1);
        buf.copy_from_slice(&sum_s);
        for &d in lms {
            if d as usize == n {
                continue;
            }
            let c = s[d as usize] as usize;
            sa[buf[c] as usize] = d;
            buf[c] += 1;
        }
        buf.copy_from_slice(&sum_l);
        let c = s[n - 1] as usize;
        sa[buf[c] as usize] = n as i32 - 1;
        buf[c] += 1;
        for i in 0..n {
            let v = sa[i];
            if v >= 1 && !ls[v as usize - 1] {
                let c = s[v as usize - 1] as usize;
                sa[buf[c] as usize] = v - 1;
                buf[c] += 1;
            }
        }
        buf.copy_from_slice(&sum_l);
        for i in (0..n).rev() {
            let v = sa[i];
            if v >= 1 && ls[v as usize - 1] {
                // an S-type symbol is never the maximum, so c <= upper
                let c = s[v as usize - 1] as usize + 1;
                buf[c] -= 1;
                sa[buf[c] as usize] = v - 1;
            }
        }
    };

    let mut lms_map = vec![-1i32; n + 1];
    let mut lms: Vec<i32> = Vec::new();
    for i in 1..n {
        if !ls[i - 1] && ls[i] {
            lms_map[i] = lms.len() as i32;
            lms.push(i as i32);
        }
    }
    let m = lms.len();

    induce(&mut sa, &mut buf, &lms);

    if m > 0 {
        let mut sorted_lms: Vec<i32> = Vec::with_capacity(m);
        for &v in &sa {
            if lms_map[v as usize] != -1 {
                sorted_lms.push(v);
            }
        }
        let mut rec_s = vec![0i32; m];
        let mut rec_upper = 0usize;
        rec_s[lms_map[sorted_lms[0] as usize] as usize] = 0;
        for i in 1..m {
            let mut l = sorted_lms[i - 1] as usize;
            let mut r = sorted_lms[i] as usize;
            let end_l = if (lms_map[l] as usize) + 1 < m {
                lms[lms_map[l] as usize + 1] as usize
            } else {
                n
            };
            let end_r = if (lms_map[r] as usize) + 1 < m {
                lms[lms_map[r] as usize + 1] as usize
            } else {
                n
            };
            let mut same = true;
            if end_l - l != end_r - r {
                same = false;
            } else {
                while l < end_l {
                    if s[l] != s[r] {
                        break;
                    }
                    l += 1;
                    r += 1;
                }
                if l == n || s[l] != s[r] {
                    same = false;
                }
            }
            if !same {
                rec_upper += 1;
            }
            rec_s[lms_map[sorted_lms[i] as usize] as usize] = rec_upper as i32;
        }
        let rec_sa = sa_is(&rec_s, rec_upper);
        for i in 0..m {
            sorted_lms[i] = lms[rec_sa[i] as usize];
        }
        induce(&mut sa, &mut buf, &sorted_lms);
    }
    sa
}

/// `lcp[r]` = longest common prefix of the suffixes at ranks `r - 1` and `r`;
/// `lcp[0] = 0`.
pub fn lcp_array(text: &[u8], sa: &[u32]) -> Vec<u32> {
    let n = text.len();
    let mut rank = vec![0u32; n];
    for (r, &p) in sa.iter().enumerate() {
        rank[p as usize] = r as u32;
    }
    let mut lcp = vec![0u32; n];
    let mut h = 0usize;
    for i in 0..n {
        let r = rank[i] as usize;
        if r == 0 {
            h = 0;
            continue;
        }
        let j = sa[r - 1] as usize;
        while i + h < n && j + h < n && text[i + h] == text[j + h] {
            h += 1;
        }
        lcp[r] = h as u32;
        h = h.saturating_sub(1);
    }
    lcp
}
