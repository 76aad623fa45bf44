//! Addressable binary min-heap over node ids `0..n` with float keys.
//!
//! Ordering is by key, then by node id, so equal keys pop the smallest id.

const ABSENT: usize = usize::MAX;

#[derive(Debug, Clone)]
pub struct IndexedMinHeap {
    heap: Vec<u32>,
    pos: Vec<usize>,
    key: Vec<f64>,
}

impl IndexedMinHeap {
    /// Heap holding every id `0..keys.len()`.
    pub fn from_keys(keys: Vec<f64>) -> Self {
        let n = keys.len();
        let mut h = IndexedMinHeap {
            heap: (0..n as u32).collect(),
            pos: (0..n).collect(),
            key: keys,
        };
        for i in (0..n / 2).rev() {
            h.sift_down(i);
        }
        h
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn contains(&self, v: u32) -> bool {
        self.pos[v as usize] != ABSENT
    }

    pub fn key(&self, v: u32) -> f64 {
        self.key[v as usize]
    }

    pub fn peek(&self) -> Option<(u32, f64)> {
        self.heap.first().map(|&v| (v, self.key[v as usize]))
    }

    pub fn pop(&mut self) -> Option<(u32, f64)> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().expect("nonempty");
        self.pos[top as usize] = ABSENT;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last as usize] = 0;
            self.sift_down(0);
        }
        Some((top, self.key[top as usize]))
    }

    /// Sets the key of a contained id, moving it up or down as needed.
    pub fn set_key(&mut self, v: u32, key: f64) {
        let i = self.pos[v as usize];
        debug_assert!(i != ABSENT, "id {v} not in heap");
        let old = self.key[v as usize];
        self.key[v as usize] = key;
        if key < old {
            self.sift_up(i);
        } else if key > old {
            self.sift_down(i);
        }
    }

    pub fn add_to_key(&mut self, v: u32, delta: f64) {
        let k = self.key[v as usize] + delta;
        self.set_key(v, k);
    }

    #[inline]
    fn less(&self, a: u32, b: u32) -> bool {
        let (ka, kb) = (self.key[a as usize], self.key[b as usize]);
        ka < kb || (ka == kb && a < b)
    }

    fn sift_up(&mut self, mut i: usize) {
        while i > 0 {
            let parent = (i - 1) / 2;
            if self.less(self.heap[i], self.heap[parent]) {
                self.swap(i, parent);
                i = parent;
            } else {
                break;
            }
        }
    }

    fn sift_down(&mut self, mut i: usize) {
        let n = self.heap.len();
        loop {
            let l = 2 * i + 1;
            if l >= n {
                break;
            }
            let r = l + 1;
            let child = if r < n && self.less(self.heap[r], self.heap[l]) { r } else { l };
            if self.less(self.heap[child], self.heap[i]) {
                self.swap(i, child);
                i = child;
            } else {
                break;
            }
        }
    }

    fn swap(&mut self, a: usize, b: usize) {
        self.heap.swap(a, b);
        self.pos[self.heap[a] as usize] = a;
        self.pos[self.heap[b] as usize] = b;
    }
}
