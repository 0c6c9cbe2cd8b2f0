//! Binary max-heap of variables ordered by activity (ties: lower index first).

#[derive(Clone, Debug, Default)]
pub(crate) struct VarHeap {
    heap: Vec<u32>,
    position: Vec<Option<usize>>,
}

fn better(activity: &[f64], a: u32, b: u32) -> bool {
    let (x, y) = (activity[a as usize], activity[b as usize]);
    x > y || (x == y && a < b)
}

impl VarHeap {
    pub fn new(num_vars: usize) -> VarHeap {
        VarHeap {
            heap: Vec::with_capacity(num_vars),
            position: vec![None; num_vars],
        }
    }

    pub fn contains(&self, v: u32) -> bool {
        self.position[v as usize].is_some()
    }

    pub fn insert(&mut self, v: u32, activity: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.heap.push(v);
        let i = self.heap.len() - 1;
        self.position[v as usize] = Some(i);
        self.sift_up(i, activity);
    }

    /// Restores the heap order after `v`'s activity increased.
    pub fn increased(&mut self, v: u32, activity: &[f64]) {
        if let Some(i) = self.position[v as usize] {
            self.sift_up(i, activity);
        }
    }

    pub fn clear(&mut self) {
        for &v in &self.heap {
            self.position[v as usize] = None;
        }
        self.heap.clear();
    }

    pub fn pop(&mut self, activity: &[f64]) -> Option<u32> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().expect("non-empty");
        self.position[top as usize] = None;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.position[last as usize] = Some(0);
            self.sift_down(0, activity);
        }
        Some(top)
    }

    fn sift_up(&mut self, mut i: usize, activity: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            let p = self.heap[parent];
            if !better(activity, v, p) {
                break;
            }
            self.heap[i] = p;
            self.position[p as usize] = Some(i);
            i = parent;
        }
        self.heap[i] = v;
        self.position[v as usize] = Some(i);
    }

    fn sift_down(&mut self, mut i: usize, activity: &[f64]) {
        let v = self.heap[i];
        loop {
            let left = 2 * i + 1;
            if left >= self.heap.len() {
                break;
            }
            let right = left + 1;
            let child = if right < self.heap.len() && better(activity, self.heap[right], self.heap[left]) {
                right
            } else {
                left
            };
            let c = self.heap[child];
            if !better(activity, c, v) {
                break;
            }
            self.heap[i] = c;
            self.position[c as usize] = Some(i);
            i = child;
        }
        self.heap[i] = v;
        self.position[v as usize] = Some(i);
    }
}
