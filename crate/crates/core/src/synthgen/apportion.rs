use rand::Rng;

use super::Sampling;

/// Splits batches of sites over destinations so that the running totals stay
/// as close as possible to the target proportions.
///
/// Stratified mode carries the rounding error of each batch over to the next
/// one; independent mode draws every site on its own.
#[derive(Debug, Clone)]
pub(crate) struct Apportioner<const N: usize> {
    probs: [f64; N],
    expected: [f64; N],
    realized: [f64; N],
}

impl<const N: usize> Apportioner<N> {
    /// `probs` must be non-negative with a positive sum; it is normalized.
    pub fn new(probs: [f64; N]) -> Self {
        let total: f64 = probs.iter().sum();
        let mut p = probs;
        for x in &mut p {
            *x /= total;
        }
        Apportioner {
            probs: p,
            expected: [0.0; N],
            realized: [0.0; N],
        }
    }

    pub fn allocate<R: Rng>(&mut self, n: usize, sampling: Sampling, rng: &mut R) -> [usize; N] {
        let counts = match sampling {
            Sampling::Independent => self.draw(n, rng),
            Sampling::Stratified => self.carry(n),
        };
        self.record(n, &counts);
        counts
    }

    /// Books an allocation made elsewhere.
    pub fn record(&mut self, n: usize, counts: &[usize; N]) {
        for j in 0..N {
            self.expected[j] += n as f64 * self.probs[j];
            self.realized[j] += counts[j] as f64;
        }
    }

    fn draw<R: Rng>(&self, n: usize, rng: &mut R) -> [usize; N] {
        let mut counts = [0; N];
        for _ in 0..n {
            let mut x = rng.gen::<f64>();
            let mut pick = N - 1;
            for (j, &p) in self.probs.iter().enumerate() {
                if x < p {
                    pick = j;
                    break;
                }
                x -= p;
            }
            while self.probs[pick] == 0.0 && pick > 0 {
                pick -= 1;
            }
            counts[pick] += 1;
        }
        counts
    }

    fn carry(&self, n: usize) -> [usize; N] {
        let mut want = [0.0; N];
        for j in 0..N {
            if self.probs[j] > 0.0 {
                want[j] = (self.expected[j] + n as f64 * self.probs[j] - self.realized[j]).max(0.0);
            }
        }
        let total: f64 = want.iter().sum();
        if total <= 0.0 {
            want = self.probs;
        }
        let total: f64 = want.iter().sum();
        largest_remainder(&want.map(|w| w * n as f64 / total), n)
    }
}

/// Rounds `quotas` (summing to `n`) to integers summing to `n`.
pub(crate) fn largest_remainder<const N: usize>(quotas: &[f64; N], n: usize) -> [usize; N] {
    let mut counts = quotas.map(|q| q.floor().max(0.0) as usize);
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..N).filter(|&j| quotas[j] > 0.0).collect();
    order.sort_by(|&a, &b| {
        let fa = quotas[a] - quotas[a].floor();
        let fb = quotas[b] - quotas[b].floor();
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    let mut left = n.saturating_sub(assigned);
    let mut k = 0;
    while left > 0 && !order.is_empty() {
        counts[order[k % order.len()]] += 1;
        left -= 1;
        k += 1;
    }
    counts
}
