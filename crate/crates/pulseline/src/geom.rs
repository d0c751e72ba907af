//! Axis-aligned pixel rectangles.

use serde::{Deserialize, Serialize};

/// Rectangle in pixel coordinates: top-left corner plus width and height.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rect {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

impl Rect {
    pub fn new(x: u32, y: u32, w: u32, h: u32) -> Self {
        Rect { x, y, w, h }
    }

    pub fn area(&self) -> u64 {
        self.w as u64 * self.h as u64
    }

    /// Right edge, exclusive.
    pub fn x1(&self) -> u64 {
        self.x as u64 + self.w as u64
    }

    /// Bottom edge, exclusive.
    pub fn y1(&self) -> u64 {
        self.y as u64 + self.h as u64
    }

    /// True when `self` lies fully inside a `w` x `h` region anchored at the origin.
    pub fn fits_within(&self, w: u32, h: u32) -> bool {
        self.x1() <= w as u64 && self.y1() <= h as u64
    }

    /// True when `inner` (in coordinates local to `self`'s size) fits inside `self`.
    pub fn contains_local(&self, inner: &Rect) -> bool {
        inner.fits_within(self.w, self.h)
    }

    /// Intersection with a `w` x `h` region anchored at the origin.
    /// Returns `None` when the overlap is empty.
    pub fn clipped_to(&self, w: u32, h: u32) -> Option<Rect> {
        if self.x >= w || self.y >= h {
            return None;
        }
        let cw = (self.x1().min(w as u64) - self.x as u64) as u32;
        let ch = (self.y1().min(h as u64) - self.y as u64) as u32;
        if cw == 0 || ch == 0 {
            None
        } else {
            Some(Rect::new(self.x, self.y, cw, ch))
        }
    }

    /// Parse "x,y,w,h".
    pub fn parse(s: &str) -> Option<Rect> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 4 {
            return None;
        }
        let v: Option<Vec<u32>> = parts.iter().map(|p| p.trim().parse().ok()).collect();
        let v = v?;
        if v[2] == 0 || v[3] == 0 {
            return None;
        }
        Some(Rect::new(v[0], v[1], v[2], v[3]))
    }
}
