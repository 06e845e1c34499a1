use thiserror::Error;

/// Half-open wire interval `[lo, hi)`; `hi = None` is unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WireRange {
    pub lo: u32,
    pub hi: Option<u32>,
}

impl WireRange {
    pub const fn from(lo: u32) -> Self {
        WireRange { lo, hi: None }
    }

    pub const fn bounded(lo: u32, hi: u32) -> Self {
        WireRange { lo, hi: Some(hi) }
    }

    pub fn capacity(&self) -> Option<u32> {
        self.hi.map(|hi| hi.saturating_sub(self.lo))
    }
}

/// An occupied rectangle: time `[t_start, t_end)` by wires `[w_lo, w_hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rect {
    pub t_start: u64,
    pub t_end: u64,
    pub w_lo: u32,
    pub w_hi: u32,
}

impl Rect {
    pub fn overlaps(&self, other: &Rect) -> bool {
        self.t_start < other.t_end
            && other.t_start < self.t_end
            && self.w_lo < other.w_hi
            && other.w_lo < self.w_hi
    }

    fn overlaps_time(&self, t_start: u64, t_end: u64) -> bool {
        self.t_start < t_end && t_start < self.t_end
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CapacityError {
    #[error("box of width {width} does not fit in {capacity} wire(s)")]
    TooWide { width: u32, capacity: u32 },
    #[error("no {width} free wire(s) over time [{t_start}, {t_end})")]
    NoRoom { width: u32, t_start: u64, t_end: u64 },
}

/// Space-time occupancy for one scheduler run.
#[derive(Debug, Clone, Default)]
pub struct Occupancy {
    rects: Vec<Rect>,
    max_wires: Option<u32>,
}

impl Occupancy {
    pub fn new() -> Self {
        Self::default()
    }

    /// Occupancy with a hard wire limit `m`: nothing may extend past wire `m`.
    pub fn with_limit(max_wires: Option<u32>) -> Self {
        Occupancy { rects: Vec::new(), max_wires }
    }

    pub fn max_wires(&self) -> Option<u32> {
        self.max_wires
    }

    pub fn rects(&self) -> &[Rect] {
        &self.rects
    }

    /// The range clipped to the hard limit.
    fn clip(&self, range: WireRange) -> WireRange {
        let hi = match (range.hi, self.max_wires) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        WireRange { lo: range.lo, hi }
    }

    /// Lowest `w_lo` in `range` with `width` wires free over `[t, t + duration)`.
    fn lowest_gap(&self, range: WireRange, width: u32, t: u64, duration: u64) -> Option<u32> {
        let t_end = t + duration;
        let mut blocking: Vec<(u32, u32)> = self
            .rects
            .iter()
            .filter(|r| r.overlaps_time(t, t_end) && r.w_hi > range.lo)
            .map(|r| (r.w_lo, r.w_hi))
            .collect();
        blocking.sort_unstable();
        let mut w = range.lo;
        for (lo, hi) in blocking {
            if lo >= w + width {
                break;
            }
            w = w.max(hi);
        }
        match range.hi {
            Some(hi) if w + width > hi => None,
            _ => Some(w),
        }
    }

    /// Finds the lexicographically smallest `(t_start, w_lo)` anchor with
    /// `t_start >= earliest` for a `width x duration` box inside `range`,
    /// without occupying it.
    pub fn find_first_fit(
        &self,
        range: WireRange,
        width: u32,
        duration: u64,
        earliest: u64,
    ) -> Result<Rect, CapacityError> {
        assert!(width >= 1 && duration >= 1, "boxes must be at least 1x1");
        let range = self.clip(range);
        if let Some(cap) = range.capacity() {
            if width > cap {
                return Err(CapacityError::TooWide { width, capacity: cap });
            }
        }
        // The minimal feasible start is `earliest` or the end of some box.
        let mut candidates: Vec<u64> = self
            .rects
            .iter()
            .map(|r| r.t_end)
            .filter(|&t| t > earliest)
            .collect();
        candidates.push(earliest);
        candidates.sort_unstable();
        candidates.dedup();
        for t in candidates {
            if let Some(w) = self.lowest_gap(range, width, t, duration) {
                return Ok(Rect { t_start: t, t_end: t + duration, w_lo: w, w_hi: w + width });
            }
        }
        unreachable!("after the last box ends the whole range is free")
    }

    /// First-fit placement over the whole wire axis (bounded by the limit).
    pub fn place_first_fit(&mut self, width: u32, duration: u64, earliest: u64) -> Result<Rect, CapacityError> {
        self.place_first_fit_in(WireRange::from(0), width, duration, earliest)
    }

    pub fn place_first_fit_in(
        &mut self,
        range: WireRange,
        width: u32,
        duration: u64,
        earliest: u64,
    ) -> Result<Rect, CapacityError> {
        let rect = self.find_first_fit(range, width, duration, earliest)?;
        self.rects.push(rect);
        Ok(rect)
    }

    /// Places a box that must start exactly at `t_start`, on the lowest free
    /// wires in `range`.
    pub fn place_at_time(
        &mut self,
        range: WireRange,
        width: u32,
        t_start: u64,
        duration: u64,
    ) -> Result<Rect, CapacityError> {
        let range = self.clip(range);
        if let Some(cap) = range.capacity() {
            if width > cap {
                return Err(CapacityError::TooWide { width, capacity: cap });
            }
        }
        let w = self
            .lowest_gap(range, width, t_start, duration)
            .ok_or(CapacityError::NoRoom { width, t_start, t_end: t_start + duration })?;
        let rect = Rect { t_start, t_end: t_start + duration, w_lo: w, w_hi: w + width };
        self.rects.push(rect);
        Ok(rect)
    }

    /// Occupies an explicitly chosen rectangle. Panics if it collides: callers
    /// only use this for layouts they computed against an empty region.
    pub fn occupy(&mut self, rect: Rect) {
        assert!(
            self.rects.iter().all(|r| !r.overlaps(&rect)),
            "explicit placement {rect:?} collides"
        );
        if let Some(m) = self.max_wires {
            assert!(rect.w_hi <= m, "explicit placement {rect:?} exceeds limit {m}");
        }
        self.rects.push(rect);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_occupancy_places_at_origin() {
        let mut occ = Occupancy::new();
        let r = occ.place_first_fit(2, 3, 0).unwrap();
        assert_eq!(r, Rect { t_start: 0, t_end: 3, w_lo: 0, w_hi: 2 });
    }

    #[test]
    fn packs_beside_existing_box() {
        let mut occ = Occupancy::new();
        occ.place_first_fit(2, 3, 0).unwrap();
        let r = occ.place_first_fit(2, 1, 0).unwrap();
        assert_eq!(r, Rect { t_start: 0, t_end: 1, w_lo: 2, w_hi: 4 });
    }

    #[test]
    fn hard_limit() {
        let mut occ = Occupancy::with_limit(Some(2));
        assert_eq!(
            occ.place_first_fit(3, 1, 0),
            Err(CapacityError::TooWide { width: 3, capacity: 2 })
        );
        occ.place_first_fit(2, 3, 0).unwrap();
        // No room beside it: waits for it to finish.
        let r = occ.place_first_fit(1, 1, 1).unwrap();
        assert_eq!(r, Rect { t_start: 3, t_end: 4, w_lo: 0, w_hi: 1 });
    }

    #[test]
    fn region_offsets() {
        let mut occ = Occupancy::new();
        let r = occ.place_first_fit_in(WireRange::from(5), 3, 2, 4).unwrap();
        assert_eq!(r, Rect { t_start: 4, t_end: 6, w_lo: 5, w_hi: 8 });
        let r = occ.place_first_fit_in(WireRange::bounded(5, 8), 3, 2, 4).unwrap();
        assert_eq!(r.t_start, 6);
    }

    #[test]
    fn place_at_time_requires_exact_start() {
        let mut occ = Occupancy::with_limit(Some(1));
        occ.place_first_fit(1, 5, 0).unwrap();
        assert!(matches!(
            occ.place_at_time(WireRange::from(0), 1, 2, 1),
            Err(CapacityError::NoRoom { .. })
        ));
        assert_eq!(occ.place_at_time(WireRange::from(0), 1, 5, 1).unwrap().t_start, 5);
    }

    const WIRES: u32 = 32;
    const HORIZON: usize = 128;

    /// Brute-force anchor scan over a cell map.
    fn brute_force(cells: &[[bool; WIRES as usize]], width: u32, duration: u64, earliest: u64) -> (u64, u32) {
        for t in earliest..(HORIZON as u64 - duration) {
            for w in 0..=WIRES - width {
                let free = (t..t + duration)
                    .all(|tt| (w..w + width).all(|ww| !cells[tt as usize][ww as usize]));
                if free {
                    return (t, w);
                }
            }
        }
        panic!("horizon too short");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn first_fit_matches_brute_force(
            requests in prop::collection::vec((1u32..12, 1u64..8, 0u64..24), 1..40),
        ) {
            let mut occ = Occupancy::with_limit(Some(WIRES));
            let mut cells = vec![[false; WIRES as usize]; HORIZON];
            for (width, duration, earliest) in requests {
                let (t, w) = brute_force(&cells, width, duration, earliest);
                let got = occ.place_first_fit(width, duration, earliest).unwrap();
                prop_assert_eq!((got.t_start, got.w_lo), (t, w));
                for t in got.t_start..got.t_end {
                    for w in got.w_lo..got.w_hi {
                        prop_assert!(!cells[t as usize][w as usize], "cell ({t},{w}) double-booked");
                        cells[t as usize][w as usize] = true;
                    }
                }
            }
            let rects = occ.rects();
            for (i, a) in rects.iter().enumerate() {
                for b in &rects[i + 1..] {
                    prop_assert!(!a.overlaps(b));
                }
            }
        }
    }
}
