/// Area of the even–odd interior of a closed polygon by counting pixel centres
/// on a `res × res` grid over its bounding box, one scanline at a time.
pub fn pixel_area(pts: &[[f64; 2]], res: usize) -> f64 {
    if pts.len() < 3 || res == 0 {
        return 0.0;
    }
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in pts {
        for d in 0..2 {
            lo[d] = lo[d].min(p[d]);
            hi[d] = hi[d].max(p[d]);
        }
    }
    let (w, h) = ((hi[0] - lo[0]) / res as f64, (hi[1] - lo[1]) / res as f64);
    let m = pts.len();
    let mut count: u64 = 0;
    let mut xs = Vec::new();
    for row in 0..res {
        let y = lo[1] + (row as f64 + 0.5) * h;
        xs.clear();
        for i in 0..m {
            let (a, b) = (pts[i], pts[(i + 1) % m]);
            if (a[1] > y) != (b[1] > y) {
                xs.push(a[0] + (y - a[1]) / (b[1] - a[1]) * (b[0] - a[0]));
            }
        }
        xs.sort_by(f64::total_cmp);
        for pair in xs.chunks_exact(2) {
            // pixel centres lo + (c + ½)w in [x0, x1)
            let first = ((pair[0] - lo[0]) / w - 0.5).ceil().max(0.0) as u64;
            let last = ((pair[1] - lo[0]) / w - 0.5).ceil().max(0.0) as u64;
            count += last.saturating_sub(first);
        }
    }
    count as f64 * w * h
}
