/// Binary indexed tree over non-negative `f64` weights supporting point
/// updates and weighted sampling in `O(log n)`.
#[derive(Debug, Clone)]
pub struct Fenwick {
    tree: Vec<f64>,
    len: usize,
    total: f64,
}

impl Fenwick {
    pub fn with_capacity(capacity: usize) -> Self {
        Self {
            tree: vec![0.0; capacity + 1],
            len: 0,
            total: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    /// Appends a slot with weight `w`. Grows the tree if needed.
    pub fn push(&mut self, w: f64) {
        if self.len + 1 >= self.tree.len() {
            let weights: Vec<f64> = (0..self.len).map(|i| self.weight(i)).collect();
            let mut grown = Fenwick::with_capacity(2 * self.tree.len().max(4));
            for w in weights {
                grown.push(w);
            }
            *self = grown;
        }
        self.len += 1;
        self.add(self.len - 1, w);
    }

    pub fn add(&mut self, index: usize, delta: f64) {
        assert!(index < self.len, "fenwick index {index} out of range {}", self.len);
        self.total += delta;
        let mut i = index + 1;
        while i < self.tree.len() {
            self.tree[i] += delta;
            i += i & i.wrapping_neg();
        }
    }

    /// Sum of weights `[0, end)`.
    pub fn prefix(&self, end: usize) -> f64 {
        let mut s = 0.0;
        let mut i = end.min(self.len);
        while i > 0 {
            s += self.tree[i];
            i &= i - 1;
        }
        s
    }

    pub fn weight(&self, index: usize) -> f64 {
        self.prefix(index + 1) - self.prefix(index)
    }

    /// Smallest index whose inclusive prefix sum exceeds `u`, for `u` in
    /// `[0, total)`. Clamps to the last slot against rounding.
    pub fn find(&self, mut u: f64) -> usize {
        let mut pos = 0;
        let mut step = (self.tree.len() - 1).next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next < self.tree.len() && next <= self.len && self.tree[next] <= u {
                u -= self.tree[next];
                pos = next;
            }
            step >>= 1;
        }
        pos.min(self.len - 1)
    }

    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u = rng.random::<f64>() * self.total;
        self.find(u)
    }
}
