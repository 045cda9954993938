//! Exact planar primitives and contour algorithms consumed by every other module.
//!
//! Conventions: meters and radians everywhere, counter-clockwise positive,
//! angles normalized to (-pi, pi].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used for exactness checks (unit norms, perpendicularity).
pub const EPS: f64 = 1e-9;

/// Normalizes an angle to the half-open interval (-pi, pi].
pub fn normalize_angle(a: f64) -> f64 {
    let r = a.rem_euclid(std::f64::consts::TAU);
    if r > std::f64::consts::PI {
        r - std::f64::consts::TAU
    } else {
        r
    }
}

// ---------------------------------------------------------------------------
// Core value types
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vector2 {
    pub dx: f64,
    pub dy: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn vector_to(self, other: Point2) -> Vector2 {
        Vector2::new(other.x - self.x, other.y - self.y)
    }

    pub fn distance(self, other: Point2) -> f64 {
        self.vector_to(other).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Vector2 {
    pub const fn new(dx: f64, dy: f64) -> Self {
        Vector2 { dx, dy }
    }

    pub fn norm(self) -> f64 {
        self.dx.hypot(self.dy)
    }

    pub fn norm_sq(self) -> f64 {
        self.dx * self.dx + self.dy * self.dy
    }

    pub fn dot(self, other: Vector2) -> f64 {
        self.dx * other.dx + self.dy * other.dy
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, other: Vector2) -> f64 {
        self.dx * other.dy - self.dy * other.dx
    }

    pub fn scaled(self, s: f64) -> Vector2 {
        Vector2::new(self.dx * s, self.dy * s)
    }

    pub fn normalized(self) -> Result<Vector2> {
        let n = self.norm();
        if n < EPS {
            return Err(Error::DegenerateVector);
        }
        Ok(self.scaled(1.0 / n))
    }

    /// Perpendicular pointing to the left of this direction.
    pub fn perp_left(self) -> Vector2 {
        Vector2::new(-self.dy, self.dx)
    }

    pub fn angle(self) -> f64 {
        self.dy.atan2(self.dx)
    }

    pub fn rotated(self, theta: f64) -> Vector2 {
        let (s, c) = theta.sin_cos();
        Vector2::new(c * self.dx - s * self.dy, s * self.dx + c * self.dy)
    }

    pub fn from_angle(theta: f64) -> Vector2 {
        Vector2::new(theta.cos(), theta.sin())
    }
}

impl std::ops::Add<Vector2> for Point2 {
    type Output = Point2;
    fn add(self, v: Vector2) -> Point2 {
        Point2::new(self.x + v.dx, self.y + v.dy)
    }
}

impl std::ops::Add for Vector2 {
    type Output = Vector2;
    fn add(self, o: Vector2) -> Vector2 {
        Vector2::new(self.dx + o.dx, self.dy + o.dy)
    }
}

impl std::ops::Sub for Vector2 {
    type Output = Vector2;
    fn sub(self, o: Vector2) -> Vector2 {
        Vector2::new(self.dx - o.dx, self.dy - o.dy)
    }
}

impl std::ops::Neg for Vector2 {
    type Output = Vector2;
    fn neg(self) -> Vector2 {
        Vector2::new(-self.dx, -self.dy)
    }
}

/// Planar pose: position plus heading, theta kept in (-pi, pi].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose2 {
    pub position: Point2,
    pub theta: f64,
}

impl Pose2 {
    pub fn new(position: Point2, theta: f64) -> Self {
        Pose2 {
            position,
            theta: normalize_angle(theta),
        }
    }

    /// Maps a point expressed in this pose's frame into the world.
    pub fn apply(self, local: Point2) -> Point2 {
        let v = Vector2::new(local.x, local.y).rotated(self.theta);
        self.position + v
    }

    pub fn rotate_vec(self, v: Vector2) -> Vector2 {
        v.rotated(self.theta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment2 {
    pub a: Point2,
    pub b: Point2,
}

impl Segment2 {
    pub fn new(a: Point2, b: Point2) -> Result<Self> {
        if a.distance(b) <= 1e-9 {
            return Err(Error::DegenerateContour(format!(
                "segment endpoints coincide at ({:.6}, {:.6})",
                a.x, a.y
            )));
        }
        Ok(Segment2 { a, b })
    }

    pub fn direction(self) -> Vector2 {
        self.a.vector_to(self.b)
    }

    pub fn unit_direction(self) -> Vector2 {
        self.direction().normalized().expect("segment is non-degenerate")
    }

    pub fn length(self) -> f64 {
        self.direction().norm()
    }

    pub fn midpoint(self) -> Point2 {
        Point2::new((self.a.x + self.b.x) * 0.5, (self.a.y + self.b.y) * 0.5)
    }

    pub fn closest_point(self, p: Point2) -> Point2 {
        let d = self.direction();
        let t = (self.a.vector_to(p).dot(d) / d.norm_sq()).clamp(0.0, 1.0);
        self.a + d.scaled(t)
    }

    pub fn distance_to_point(self, p: Point2) -> f64 {
        self.closest_point(p).distance(p)
    }

    /// Proper intersection test, endpoints included.
    pub fn intersects(self, other: Segment2) -> bool {
        let d1 = self.direction();
        let d2 = other.direction();
        let denom = d1.cross(d2);
        let qp = self.a.vector_to(other.a);
        if denom.abs() < 1e-15 {
            // Parallel: overlap only when collinear.
            if qp.cross(d1).abs() > 1e-12 {
                return false;
            }
            let len_sq = d1.norm_sq();
            let t0 = qp.dot(d1) / len_sq;
            let t1 = t0 + d2.dot(d1) / len_sq;
            let (lo, hi) = if t0 < t1 { (t0, t1) } else { (t1, t0) };
            return hi >= 0.0 && lo <= 1.0;
        }
        let t = qp.cross(d2) / denom;
        let u = qp.cross(d1) / denom;
        (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u)
    }
}

/// Open chain of segments; the tool shape representation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    points: Vec<Point2>,
}

impl Polyline {
    pub fn new(points: Vec<Point2>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::DegenerateContour(
                "polyline needs at least 2 points".into(),
            ));
        }
        for (i, w) in points.windows(2).enumerate() {
            if w[0].distance(w[1]) <= 1e-9 {
                return Err(Error::DegenerateContour(format!(
                    "consecutive points {i} and {} coincide",
                    i + 1
                )));
            }
            if !w[0].is_finite() || !w[1].is_finite() {
                return Err(Error::DegenerateContour("non-finite coordinate".into()));
            }
        }
        Ok(Polyline { points })
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn segment_count(&self) -> usize {
        self.points.len() - 1
    }

    pub fn segment(&self, i: usize) -> Segment2 {
        Segment2 {
            a: self.points[i],
            b: self.points[i + 1],
        }
    }

    pub fn segments(&self) -> impl Iterator<Item = Segment2> + '_ {
        (0..self.segment_count()).map(|i| self.segment(i))
    }

    pub fn bbox(&self) -> (Point2, Point2) {
        bbox_of(&self.points)
    }

    /// Largest distance from any vertex to the given local point.
    pub fn max_extent_from(&self, p: Point2) -> f64 {
        self.points
            .iter()
            .map(|q| p.distance(*q))
            .fold(0.0, f64::max)
    }
}

fn bbox_of(points: &[Point2]) -> (Point2, Point2) {
    let mut min = Point2::new(f64::INFINITY, f64::INFINITY);
    let mut max = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in points {
        min.x = min.x.min(p.x);
        min.y = min.y.min(p.y);
        max.x = max.x.max(p.x);
        max.y = max.y.max(p.y);
    }
    (min, max)
}

/// Simple closed contour, stored counter-clockwise (positive signed area).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedContour {
    points: Vec<Point2>,
}

impl ClosedContour {
    pub fn new(mut points: Vec<Point2>) -> Result<Self> {
        // Drop a duplicated closing vertex if present.
        if points.len() >= 2
            && points[0].distance(points[points.len() - 1]) <= 1e-12
        {
            points.pop();
        }
        if points.len() < 3 {
            return Err(Error::DegenerateContour(
                "closed contour needs at least 3 points".into(),
            ));
        }
        let n = points.len();
        for i in 0..n {
            let j = (i + 1) % n;
            if points[i].distance(points[j]) <= 1e-12 {
                return Err(Error::DegenerateContour(format!(
                    "contour vertices {i} and {j} coincide"
                )));
            }
        }
        if signed_area(&points) < 0.0 {
            points.reverse();
        }
        Ok(ClosedContour { points })
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.points).abs()
    }

    pub fn perimeter(&self) -> f64 {
        let n = self.points.len();
        (0..n)
            .map(|i| self.points[i].distance(self.points[(i + 1) % n]))
            .sum()
    }

    /// Even-odd containment test.
    pub fn contains(&self, p: Point2) -> bool {
        point_in_polygon(&self.points, p)
    }

    pub fn distance_to_boundary(&self, p: Point2) -> f64 {
        let n = self.points.len();
        (0..n)
            .map(|i| {
                Segment2 {
                    a: self.points[i],
                    b: self.points[(i + 1) % n],
                }
                .distance_to_point(p)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Resamples the boundary at a uniform arc-length step.
    pub fn resample(&self, step: f64) -> Result<ClosedContour> {
        if step <= 0.0 {
            return Err(Error::InvalidParameter("resample step must be > 0".into()));
        }
        let perim = self.perimeter();
        let n = ((perim / step).ceil() as usize).max(8);
        let h = perim / n as f64;
        let mut out = Vec::with_capacity(n);
        let m = self.points.len();
        let mut edge = 0usize;
        let mut consumed = 0.0; // arc length already spent on previous edges
        let mut edge_len = self.points[0].distance(self.points[1 % m]);
        for i in 0..n {
            let target = i as f64 * h;
            while target > consumed + edge_len + 1e-15 {
                consumed += edge_len;
                edge += 1;
                edge_len = self.points[edge % m].distance(self.points[(edge + 1) % m]);
            }
            let t = ((target - consumed) / edge_len).clamp(0.0, 1.0);
            let a = self.points[edge % m];
            let b = self.points[(edge + 1) % m];
            out.push(a + a.vector_to(b).scaled(t));
        }
        ClosedContour::new(out)
    }

    /// O(n^2) simplicity check, intended for tests and validation paths.
    pub fn is_simple(&self) -> bool {
        let n = self.points.len();
        for i in 0..n {
            let si = Segment2 {
                a: self.points[i],
                b: self.points[(i + 1) % n],
            };
            for j in i + 1..n {
                // Skip adjacent edges which share an endpoint.
                if j == i || (j + 1) % n == i || (i + 1) % n == j {
                    continue;
                }
                let sj = Segment2 {
                    a: self.points[j],
                    b: self.points[(j + 1) % n],
                };
                if si.intersects(sj) {
                    return false;
                }
            }
        }
        true
    }
}

pub fn signed_area(points: &[Point2]) -> f64 {
    let n = points.len();
    let mut acc = 0.0;
    for i in 0..n {
        let p = points[i];
        let q = points[(i + 1) % n];
        acc += p.x * q.y - q.x * p.y;
    }
    acc * 0.5
}

pub fn point_in_polygon(points: &[Point2], p: Point2) -> bool {
    let n = points.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let pi = points[i];
        let pj = points[j];
        if ((pi.y > p.y) != (pj.y > p.y))
            && (p.x < (pj.x - pi.x) * (p.y - pi.y) / (pj.y - pi.y) + pi.x)
        {
            inside = !inside;
        }
        j = i;
    }
    inside
}

/// Convex hull (monotone chain), counter-clockwise, no repeated last point.
pub fn convex_hull(points: &[Point2]) -> Vec<Point2> {
    let mut pts: Vec<Point2> = points.to_vec();
    pts.sort_by(|a, b| a.x.partial_cmp(&b.x).unwrap().then(a.y.partial_cmp(&b.y).unwrap()));
    pts.dedup_by(|a, b| a.distance(*b) < 1e-12);
    let n = pts.len();
    if n < 3 {
        return pts;
    }
    let turn_ok = |chain: &[Point2], p: Point2| {
        let a = chain[chain.len() - 2];
        let b = chain[chain.len() - 1];
        a.vector_to(b).cross(b.vector_to(p)) > 1e-15
    };
    let mut lower: Vec<Point2> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && !turn_ok(&lower, p) {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point2> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && !turn_ok(&upper, p) {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Signed clearance of `p` from the hull: negative inside, positive outside.
pub fn hull_clearance(hull: &[Point2], p: Point2) -> f64 {
    if hull.len() < 3 {
        // Degenerate hull: distance to the point set.
        return hull
            .iter()
            .map(|q| q.distance(p))
            .fold(f64::INFINITY, f64::min);
    }
    let d = (0..hull.len())
        .map(|i| {
            Segment2 {
                a: hull[i],
                b: hull[(i + 1) % hull.len()],
            }
            .distance_to_point(p)
        })
        .fold(f64::INFINITY, f64::min);
    if point_in_polygon(hull, p) {
        -d
    } else {
        d
    }
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Unsigned angle between two non-zero vectors, in [0, pi].
pub fn angle_between(u: Vector2, v: Vector2) -> Result<f64> {
    let nu = u.norm();
    let nv = v.norm();
    if nu < EPS || nv < EPS {
        return Err(Error::DegenerateVector);
    }
    let c = (u.dot(v) / (nu * nv)).clamp(-1.0, 1.0);
    Ok(c.acos())
}

/// Unit normals of a segment: left of the a->b direction first, then right.
pub fn segment_normal_pair(s: Segment2) -> (Vector2, Vector2) {
    let left = s
        .direction()
        .perp_left()
        .normalized()
        .expect("segment is non-degenerate");
    (left, -left)
}

/// Point of the circle nearest to `q`.
pub fn closest_point_on_circle(center: Point2, radius: f64, q: Point2) -> Result<Point2> {
    if radius <= 0.0 {
        return Err(Error::InvalidParameter("circle radius must be > 0".into()));
    }
    let dir = center.vector_to(q);
    if dir.norm() < 1e-12 {
        return Err(Error::AmbiguousProjection);
    }
    Ok(center + dir.normalized()?.scaled(radius))
}

/// Ramer-Douglas-Peucker simplification. Endpoints are preserved; with
/// `epsilon == 0` the input is returned unchanged.
pub fn rdp_simplify(points: &[Point2], epsilon: f64) -> Result<Vec<Point2>> {
    if points.is_empty() {
        return Err(Error::InvalidParameter("empty point list".into()));
    }
    if epsilon < 0.0 {
        return Err(Error::InvalidParameter("epsilon must be >= 0".into()));
    }
    if points.len() <= 2 || epsilon == 0.0 {
        return Ok(points.to_vec());
    }
    let mut keep = vec![false; points.len()];
    keep[0] = true;
    keep[points.len() - 1] = true;
    let mut stack = vec![(0usize, points.len() - 1)];
    while let Some((lo, hi)) = stack.pop() {
        if hi <= lo + 1 {
            continue;
        }
        let a = points[lo];
        let b = points[hi];
        let chord = a.vector_to(b);
        let chord_len = chord.norm();
        let mut max_d = -1.0;
        let mut max_i = lo;
        for i in lo + 1..hi {
            let d = if chord_len < 1e-12 {
                a.distance(points[i])
            } else {
                (a.vector_to(points[i]).cross(chord) / chord_len).abs()
            };
            if d > max_d {
                max_d = d;
                max_i = i;
            }
        }
        if max_d > epsilon {
            keep[max_i] = true;
            stack.push((lo, max_i));
            stack.push((max_i, hi));
        }
    }
    Ok(points
        .iter()
        .zip(&keep)
        .filter(|(_, k)| **k)
        .map(|(p, _)| *p)
        .collect())
}

/// Cap on the polygonization step so arcs stay close to round even when
/// `arc_tol` is loose relative to the radius.
const MAX_ARC_STEP: f64 = 15.0 * std::f64::consts::PI / 180.0;

fn arc_step(radius: f64, arc_tol: f64) -> f64 {
    let by_tol = if arc_tol >= radius {
        std::f64::consts::FRAC_PI_2
    } else {
        2.0 * (1.0 - arc_tol / radius).acos()
    };
    by_tol.min(MAX_ARC_STEP)
}

/// Emits the interior points of an arc around `center` from angle `from`,
/// sweeping by the signed `sweep`.
fn push_arc_interior(
    out: &mut Vec<Point2>,
    center: Point2,
    radius: f64,
    from: f64,
    sweep: f64,
    arc_tol: f64,
) {
    let steps = ((sweep.abs() / arc_step(radius, arc_tol)).ceil() as usize).max(1);
    for k in 1..steps {
        let a = from + sweep * k as f64 / steps as f64;
        out.push(center + Vector2::from_angle(a).scaled(radius));
    }
}

fn push_dedup(out: &mut Vec<Point2>, p: Point2) {
    if out.last().map_or(true, |q| q.distance(p) > 1e-12) {
        out.push(p);
    }
}

/// One offset side of an open polyline (the left side walking forward),
/// with arcs at convex joins and miters at concave joins.
fn offset_side(points: &[Point2], radius: f64, arc_tol: f64, out: &mut Vec<Point2>) {
    let n = points.len();
    let dir = |i: usize| points[i].vector_to(points[i + 1]).normalized().unwrap();
    for i in 0..n - 1 {
        let d = dir(i);
        let nl = d.perp_left();
        let a_off = points[i] + nl.scaled(radius);
        let b_off = points[i + 1] + nl.scaled(radius);
        if i == 0 {
            push_dedup(out, a_off);
        } else {
            let d_prev = dir(i - 1);
            let turn = d_prev.cross(d);
            if turn < -EPS {
                // Convex on the left side: join with an arc.
                let from = d_prev.perp_left().angle();
                let sweep = normalize_angle(nl.angle() - from);
                push_arc_interior(out, points[i], radius, from, sweep, arc_tol);
                push_dedup(out, a_off);
            } else if turn > EPS {
                // Concave on the left side: intersect the two offset lines.
                let p_prev = points[i] + d_prev.perp_left().scaled(radius);
                let denom = d_prev.cross(d);
                let t = p_prev.vector_to(a_off).cross(d) / denom;
                let miter = p_prev + d_prev.scaled(t);
                if points[i].distance(miter) <= 10.0 * radius {
                    // Replace the previous edge end with the miter point.
                    out.pop();
                    push_dedup(out, miter);
                } else {
                    // Near-reversal: fall back to a bevel.
                    push_dedup(out, a_off);
                }
            }
            // Collinear joins need no extra vertex.
        }
        push_dedup(out, b_off);
    }
}

/// Minkowski sum of an open polyline with a disk of the given radius:
/// the constant-distance outline with semicircular end caps, polygonized
/// with the given arc tolerance.
pub fn offset_polyline(shape: &Polyline, radius: f64, arc_tol: f64) -> Result<ClosedContour> {
    if radius <= 0.0 {
        return Err(Error::InvalidParameter("offset radius must be > 0".into()));
    }
    if arc_tol <= 0.0 {
        return Err(Error::InvalidParameter("arc tolerance must be > 0".into()));
    }
    let fwd = shape.points().to_vec();
    let mut rev = fwd.clone();
    rev.reverse();
    let mut out: Vec<Point2> = Vec::new();

    offset_side(&fwd, radius, arc_tol, &mut out);
    // Cap at the far end: sweep -pi from the left normal through the
    // forward direction to the right normal.
    let last_dir = fwd[fwd.len() - 2]
        .vector_to(fwd[fwd.len() - 1])
        .normalized()?;
    push_arc_interior(
        &mut out,
        fwd[fwd.len() - 1],
        radius,
        last_dir.perp_left().angle(),
        -std::f64::consts::PI,
        arc_tol,
    );
    offset_side(&rev, radius, arc_tol, &mut out);
    // Cap at the start.
    let first_dir = fwd[0].vector_to(fwd[1]).normalized()?;
    push_arc_interior(
        &mut out,
        fwd[0],
        radius,
        (-first_dir).perp_left().angle(),
        -std::f64::consts::PI,
        arc_tol,
    );
    ClosedContour::new(out)
}

/// Discrete curvature per contour vertex (1/m): positions are smoothed with a
/// cyclic moving average of `smoothing_window` points, then differentiated
/// with centered finite differences over arc length.
pub fn contour_curvature(c: &ClosedContour, smoothing_window: usize) -> Result<Vec<f64>> {
    let pts = c.points();
    let n = pts.len();
    if n < 3 {
        return Err(Error::DegenerateContour("need at least 3 vertices".into()));
    }
    let q: Vec<Point2> = if smoothing_window >= 3 {
        let half = (smoothing_window / 2) as isize;
        (0..n as isize)
            .map(|i| {
                let mut sx = 0.0;
                let mut sy = 0.0;
                for k in -half..=half {
                    let j = (i + k).rem_euclid(n as isize) as usize;
                    sx += pts[j].x;
                    sy += pts[j].y;
                }
                let w = (2 * half + 1) as f64;
                Point2::new(sx / w, sy / w)
            })
            .collect()
    } else {
        pts.to_vec()
    };

    let h: Vec<f64> = (0..n)
        .map(|i| {
            let j = (i + n - 1) % n;
            q[j].distance(q[i]).max(1e-12)
        })
        .collect();

    let mut kappa = Vec::with_capacity(n);
    for i in 0..n {
        let im = (i + n - 1) % n;
        let ip = (i + 1) % n;
        let h0 = h[i]; // |q[i] - q[i-1]|
        let h1 = h[ip]; // |q[i+1] - q[i]|
        let span = h0 + h1;
        let xp = (q[ip].x - q[im].x) / span;
        let yp = (q[ip].y - q[im].y) / span;
        let xpp = 2.0 * ((q[ip].x - q[i].x) / h1 - (q[i].x - q[im].x) / h0) / span;
        let ypp = 2.0 * ((q[ip].y - q[i].y) / h1 - (q[i].y - q[im].y) / h0) / span;
        let denom = (xp * xp + yp * yp).powf(1.5).max(1e-18);
        kappa.push((xp * ypp - yp * xpp).abs() / denom);
    }
    Ok(kappa)
}
