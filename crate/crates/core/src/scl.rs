//! Low-weight codeword collection with a successive cancellation list decoder.
//!
//! The channel output is the noiseless all-zero codeword, every channel LLR equal to `+1`.
//! LLRs are propagated with the min-sum rule in integer arithmetic and each decision adds a
//! hard-decision penalty `|λ|` when it disagrees with the sign of its leaf LLR. Under these
//! conditions the final metric of a path is exactly the weight of its codeword, so the list
//! keeps the lightest codewords, and a pruned path with metric `μ` can only have lost
//! codewords of weight `>= μ`.
//!
//! Per-path LLR and partial-sum arrays live in per-depth pools shared copy-on-write between
//! paths; since every write overwrites a whole array, sharing breaks by reallocation only.

use crate::bits::{polar_transform_words, BitRow};
use crate::construction::CodeConfig;
use crate::error::{Error, Result};
use crate::oracle::{HistogramSource, WeightHistogram};
use crate::pretransform::PreTransform;

/// Metric increment for deciding `bit` at a leaf with LLR `llr`.
#[inline]
pub fn path_metric_update(bit: u8, llr: i32) -> u32 {
    let hard = u8::from(llr < 0);
    if hard == bit {
        0
    } else {
        llr.unsigned_abs()
    }
}

#[inline]
fn min_sum(a: i32, b: i32) -> i32 {
    let mag = a.abs().min(b.abs());
    if (a < 0) != (b < 0) {
        -mag
    } else {
        mag
    }
}

/// Fixed-size arrays handed out to paths with reference counts.
struct Pool<T> {
    width: usize,
    data: Vec<T>,
    refs: Vec<u32>,
    free: Vec<u32>,
}

impl<T: Copy + Default> Pool<T> {
    fn new(width: usize, capacity: usize) -> Self {
        Pool {
            width,
            data: vec![T::default(); width * capacity],
            refs: vec![0; capacity],
            free: (0..capacity as u32).rev().collect(),
        }
    }

    fn alloc(&mut self) -> u32 {
        let s = self.free.pop().expect("pool exhausted");
        self.refs[s as usize] = 1;
        s
    }

    fn retain(&mut self, s: u32) {
        self.refs[s as usize] += 1;
    }

    fn release(&mut self, s: u32) {
        let r = &mut self.refs[s as usize];
        *r -= 1;
        if *r == 0 {
            self.free.push(s);
        }
    }

    /// A slot private to the caller, replacing `s` if it is shared.
    fn writable(&mut self, s: u32) -> u32 {
        if self.refs[s as usize] == 1 {
            s
        } else {
            self.release(s);
            self.alloc()
        }
    }

    fn get(&self, s: u32) -> &[T] {
        let at = s as usize * self.width;
        &self.data[at..at + self.width]
    }

    fn get_mut(&mut self, s: u32) -> &mut [T] {
        let at = s as usize * self.width;
        &mut self.data[at..at + self.width]
    }
}

/// A surviving list entry: message `u`, transformed input `v = u·T`, codeword `v·F_N` and
/// metric.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ListEntry {
    pub message: BitRow,
    pub input: BitRow,
    pub codeword: BitRow,
    pub metric: u32,
}

/// Final list of a decode plus the pruning boundary.
#[derive(Clone, Debug)]
pub struct ListDecode {
    pub entries: Vec<ListEntry>,
    /// Smallest metric among all pruned candidates, `None` if nothing was pruned.
    pub pruned_boundary: Option<u32>,
}

struct Decoder<'a> {
    m: usize,
    n: usize,
    words: usize,
    transform: &'a PreTransform,
    is_info: Vec<bool>,
    // llr[λ] for depth λ = 1..=m (index λ-1), width n >> λ
    llr: Vec<Pool<i32>>,
    // left-sibling partial sums at depth λ = 0..m, width n >> (λ+1)
    sums: Vec<Pool<u8>>,
    // per path: slot ids, metric, message bits, input bits, dynamic-frozen accumulator
    llr_slot: Vec<u32>,
    sum_slot: Vec<u32>,
    metric: Vec<u32>,
    message: Vec<u64>,
    input: Vec<u64>,
    acc: Vec<u64>,
    free_paths: Vec<u32>,
    active: Vec<u32>,
    scratch_a: Vec<u8>,
    scratch_b: Vec<u8>,
}

impl<'a> Decoder<'a> {
    fn new(config: &CodeConfig, transform: &'a PreTransform, list_size: usize) -> Self {
        let m = config.m() as usize;
        let n = config.n();
        let words = n.div_ceil(64);
        let cap = list_size.min(1usize << config.k().min(40)).max(1);
        let llr = (1..=m).map(|d| Pool::new(n >> d, cap + 1)).collect();
        let sums = (0..m).map(|d| Pool::new(n >> (d + 1), cap + 1)).collect();
        let mut is_info = vec![false; n + 1];
        for &i in config.info_set() {
            is_info[i] = true;
        }
        let mut dec = Decoder {
            m,
            n,
            words,
            transform,
            is_info,
            llr,
            sums,
            llr_slot: vec![0; cap * m],
            sum_slot: vec![0; cap * m],
            metric: vec![0; cap],
            message: vec![0; cap * words],
            input: vec![0; cap * words],
            acc: vec![0; cap * words],
            free_paths: (0..cap as u32).rev().collect(),
            active: Vec::with_capacity(cap),
            scratch_a: Vec::with_capacity(n),
            scratch_b: Vec::with_capacity(n),
        };
        let p = dec.free_paths.pop().unwrap();
        for d in 0..m {
            dec.llr_slot[p as usize * m + d] = dec.llr[d].alloc();
            dec.sum_slot[p as usize * m + d] = dec.sums[d].alloc();
        }
        dec.active.push(p);
        dec
    }

    fn clone_path(&mut self, src: u32) -> u32 {
        let dst = self.free_paths.pop().expect("path pool exhausted");
        let (s, d, m, w) = (src as usize, dst as usize, self.m, self.words);
        for l in 0..m {
            let a = self.llr_slot[s * m + l];
            let b = self.sum_slot[s * m + l];
            self.llr[l].retain(a);
            self.sums[l].retain(b);
            self.llr_slot[d * m + l] = a;
            self.sum_slot[d * m + l] = b;
        }
        self.metric[d] = self.metric[s];
        self.message.copy_within(s * w..(s + 1) * w, d * w);
        self.input.copy_within(s * w..(s + 1) * w, d * w);
        self.acc.copy_within(s * w..(s + 1) * w, d * w);
        dst
    }

    fn kill_path(&mut self, p: u32) {
        let (p, m) = (p as usize, self.m);
        for l in 0..m {
            self.llr[l].release(self.llr_slot[p * m + l]);
            self.sums[l].release(self.sum_slot[p * m + l]);
        }
        self.free_paths.push(p as u32);
    }

    /// Computes the leaf LLR of leaf `t` (0-based) for path `p`.
    fn leaf_llr(&mut self, p: u32, t: usize) -> i32 {
        let (m, p) = (self.m, p as usize);
        let start = if t == 0 {
            1
        } else {
            m - t.trailing_zeros() as usize
        };
        for depth in start..=m {
            let right = depth == start && t != 0;
            let out = self.llr[depth - 1].writable(self.llr_slot[p * m + depth - 1]);
            self.llr_slot[p * m + depth - 1] = out;
            let width = self.n >> depth;
            if depth == 1 {
                let dst = self.llr[0].get_mut(out);
                if right {
                    let s = self.sums[0].get(self.sum_slot[p * m]);
                    for (k, o) in dst.iter_mut().enumerate() {
                        *o = 1 + if s[k] == 1 { -1 } else { 1 };
                    }
                } else {
                    dst.fill(min_sum(1, 1));
                }
                continue;
            }
            let parent = self.llr_slot[p * m + depth - 2];
            if right {
                let s_slot = self.sum_slot[p * m + depth - 1];
                let (lo, hi) = self.llr.split_at_mut(depth - 1);
                let src = lo[depth - 2].get(parent);
                let dst = hi[0].get_mut(out);
                let s = self.sums[depth - 1].get(s_slot);
                for k in 0..width {
                    let a = src[k];
                    let b = src[width + k];
                    dst[k] = if s[k] == 1 { b - a } else { b + a };
                }
            } else {
                let (lo, hi) = self.llr.split_at_mut(depth - 1);
                let src = lo[depth - 2].get(parent);
                let dst = hi[0].get_mut(out);
                for k in 0..width {
                    dst[k] = min_sum(src[k], src[width + k]);
                }
            }
        }
        self.llr[m - 1].get(self.llr_slot[p * m + m - 1])[0]
    }

    /// Records input bit `bit = u_i ⊕ (dynamic part)` at leaf `t` for path `p` and pushes
    /// partial sums upward. `message_bit` is `u_i` on information leaves.
    fn commit(&mut self, p: u32, t: usize, bit: u8, message_bit: u8) {
        let (m, pi, w) = (self.m, p as usize, self.words);
        let i = t + 1;
        if bit == 1 {
            self.input[pi * w + t / 64] |= 1 << (t % 64);
        }
        if message_bit == 1 {
            self.message[pi * w + t / 64] |= 1 << (t % 64);
            let row = self.transform.row(i).expect("information row");
            for (a, r) in self.acc[pi * w..(pi + 1) * w].iter_mut().zip(row.words()) {
                *a ^= r;
            }
        }
        let mut cur = std::mem::take(&mut self.scratch_a);
        let mut next = std::mem::take(&mut self.scratch_b);
        cur.clear();
        cur.push(bit);
        let mut depth = m;
        let mut node = t;
        while depth > 0 {
            if node & 1 == 0 {
                let slot = self.sums[depth - 1].writable(self.sum_slot[pi * m + depth - 1]);
                self.sum_slot[pi * m + depth - 1] = slot;
                self.sums[depth - 1].get_mut(slot).copy_from_slice(&cur);
                break;
            }
            let left = self.sums[depth - 1].get(self.sum_slot[pi * m + depth - 1]);
            next.clear();
            next.extend(left.iter().zip(&cur).map(|(a, b)| a ^ b));
            next.extend_from_slice(&cur);
            std::mem::swap(&mut cur, &mut next);
            depth -= 1;
            node >>= 1;
        }
        self.scratch_a = cur;
        self.scratch_b = next;
    }

    fn dynamic_frozen(&self, p: u32, t: usize) -> u8 {
        let w = self.words;
        ((self.acc[p as usize * w + t / 64] >> (t % 64)) & 1) as u8
    }

    fn run(mut self, list_size: usize) -> ListDecode {
        let mut boundary: Option<u32> = None;
        let mut leaf = Vec::new();
        let mut candidates: Vec<(u32, u32)> = Vec::new();
        for t in 0..self.n {
            let i = t + 1;
            leaf.clear();
            for idx in 0..self.active.len() {
                let p = self.active[idx];
                leaf.push(self.leaf_llr(p, t));
            }
            if !self.is_info[i] {
                for (idx, &llr) in leaf.iter().enumerate() {
                    let p = self.active[idx];
                    let bit = self.dynamic_frozen(p, t);
                    self.metric[p as usize] += path_metric_update(bit, llr);
                    self.commit(p, t, bit, 0);
                }
                continue;
            }
            // candidate (metric, rank) with rank = 2·position + u_i; positions are in
            // lexicographic order of the message prefix, so rank order is lexicographic too
            candidates.clear();
            for (idx, &llr) in leaf.iter().enumerate() {
                let p = self.active[idx];
                let base = self.metric[p as usize];
                let shift = self.dynamic_frozen(p, t);
                for u in 0..2u8 {
                    let metric = base + path_metric_update(u ^ shift, llr);
                    candidates.push((metric, (2 * idx) as u32 + u as u32));
                }
            }
            if candidates.len() > list_size {
                candidates.select_nth_unstable(list_size);
                let cut = candidates[list_size..].iter().map(|c| c.0).min().unwrap();
                boundary = Some(boundary.map_or(cut, |b| b.min(cut)));
                candidates.truncate(list_size);
                candidates.sort_unstable_by_key(|c| c.1);
            }
            let mut keep = vec![[false; 2]; self.active.len()];
            for &(_, rank) in &candidates {
                keep[(rank / 2) as usize][(rank % 2) as usize] = true;
            }
            let old = std::mem::take(&mut self.active);
            for (idx, &p) in old.iter().enumerate() {
                if keep[idx] == [false, false] {
                    self.kill_path(p);
                }
            }
            let mut next = Vec::with_capacity(candidates.len());
            for (idx, &p) in old.iter().enumerate() {
                match keep[idx] {
                    [true, true] => {
                        let q = self.clone_path(p);
                        next.push((p, 0u8, leaf[idx]));
                        next.push((q, 1u8, leaf[idx]));
                    }
                    [true, false] => next.push((p, 0, leaf[idx])),
                    [false, true] => next.push((p, 1, leaf[idx])),
                    [false, false] => {}
                }
            }
            for &(p, u, llr) in &next {
                let bit = u ^ self.dynamic_frozen(p, t);
                self.metric[p as usize] += path_metric_update(bit, llr);
                self.commit(p, t, bit, u);
                self.active.push(p);
            }
        }
        let entries = self
            .active
            .iter()
            .map(|&p| {
                let w = self.words;
                let mut message = BitRow::zeros(self.n);
                message
                    .words_mut()
                    .copy_from_slice(&self.message[p as usize * w..(p as usize + 1) * w]);
                let words = &self.input[p as usize * w..(p as usize + 1) * w];
                let mut input = BitRow::zeros(self.n);
                input.words_mut().copy_from_slice(words);
                let mut x = words.to_vec();
                polar_transform_words(&mut x, self.n);
                let mut codeword = BitRow::zeros(self.n);
                codeword.words_mut().copy_from_slice(&x);
                ListEntry {
                    message,
                    input,
                    codeword,
                    metric: self.metric[p as usize],
                }
            })
            .collect();
        ListDecode {
            entries,
            pruned_boundary: boundary,
        }
    }
}

/// Runs the list decoder on the all-zero channel output and returns the final list.
pub fn list_decode(config: &CodeConfig, transform: &PreTransform, list_size: usize) -> Result<ListDecode> {
    if list_size == 0 {
        return Err(Error::InvalidArgument("list size must be at least 1".into()));
    }
    if transform.info_set() != config.info_set() {
        return Err(Error::InvalidArgument(
            "transform was built for a different information set".into(),
        ));
    }
    Ok(Decoder::new(config, transform, list_size).run(list_size))
}

/// Weight histogram of the final list, all-zero codeword excluded. Weights at or above the
/// pruning boundary are flagged as lower bounds.
pub fn collect_low_weight(
    config: &CodeConfig,
    transform: &PreTransform,
    list_size: usize,
) -> Result<WeightHistogram> {
    let decode = list_decode(config, transform, list_size)?;
    let mut counts = vec![0u64; config.n() + 1];
    for e in &decode.entries {
        debug_assert_eq!(e.metric as usize, e.codeword.weight());
        counts[e.codeword.weight()] += 1;
    }
    #[cfg(debug_assertions)]
    {
        let mut seen: Vec<&[u64]> = decode.entries.iter().map(|e| e.message.words()).collect();
        seen.sort_unstable();
        seen.dedup();
        debug_assert_eq!(seen.len(), decode.entries.len(), "duplicate list entries");
    }
    counts[0] = 0;
    Ok(WeightHistogram::new(
        counts,
        HistogramSource::Collector { list_size },
        decode.pruned_boundary.map(|b| b as usize),
    ))
}
