//! Pure spatial predicates over integer points on a bounded 1000x1000 canvas.
//!
//! The internal frame is y-up Cartesian: "top" always means larger `y`.
//! The renderer flips the axis for image output.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Canvas side length in canvas units. Coordinates are integers in `0..=1000`.
pub const CANVAS_SIZE: i32 = 1000;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("degenerate input: the two points coincide")]
    DegenerateInput,
    #[error("ambiguous axis: relative vector lies exactly on an axis in 4-way mode")]
    AmbiguousAxis,
    #[error("tie detected: pair distances {0:.1} and {1:.1} differ by less than 1 unit")]
    TieDetected(f64, f64),
    #[error("need at least 2 pairs to rank, got {0}")]
    TooFewPairs(usize),
}

/// A labeled object position in y-up canvas coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Point {
    pub x: i32,
    pub y: i32,
}

impl Point {
    pub fn new(x: i32, y: i32) -> Self {
        debug_assert!((0..=CANVAS_SIZE).contains(&x) && (0..=CANVAS_SIZE).contains(&y));
        Point { x, y }
    }
}

/// 8-way directional label. The four diagonal variants double as the 4-way label set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DirectionLabel {
    Top,
    Bottom,
    Left,
    Right,
    TopLeft,
    TopRight,
    BottomLeft,
    BottomRight,
}

impl DirectionLabel {
    pub const DIAGONALS: [DirectionLabel; 4] = [
        DirectionLabel::TopLeft,
        DirectionLabel::TopRight,
        DirectionLabel::BottomLeft,
        DirectionLabel::BottomRight,
    ];

    pub const ALL: [DirectionLabel; 8] = [
        DirectionLabel::Top,
        DirectionLabel::Bottom,
        DirectionLabel::Left,
        DirectionLabel::Right,
        DirectionLabel::TopLeft,
        DirectionLabel::TopRight,
        DirectionLabel::BottomLeft,
        DirectionLabel::BottomRight,
    ];

    pub fn is_diagonal(self) -> bool {
        Self::DIAGONALS.contains(&self)
    }

    /// Point reflection: the label seen from the other endpoint.
    pub fn opposite(self) -> Self {
        match self {
            DirectionLabel::Top => DirectionLabel::Bottom,
            DirectionLabel::Bottom => DirectionLabel::Top,
            DirectionLabel::Left => DirectionLabel::Right,
            DirectionLabel::Right => DirectionLabel::Left,
            DirectionLabel::TopLeft => DirectionLabel::BottomRight,
            DirectionLabel::TopRight => DirectionLabel::BottomLeft,
            DirectionLabel::BottomLeft => DirectionLabel::TopRight,
            DirectionLabel::BottomRight => DirectionLabel::TopLeft,
        }
    }

    /// Prompt-facing wording ("top left", not "top-left").
    pub fn as_text(self) -> &'static str {
        match self {
            DirectionLabel::Top => "top",
            DirectionLabel::Bottom => "bottom",
            DirectionLabel::Left => "left",
            DirectionLabel::Right => "right",
            DirectionLabel::TopLeft => "top left",
            DirectionLabel::TopRight => "top right",
            DirectionLabel::BottomLeft => "bottom left",
            DirectionLabel::BottomRight => "bottom right",
        }
    }
}

/// One of the nine canvas regions cut by the 40%/60% thresholds on both axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegionLabel {
    Center,
    Top,
    Bottom,
    Left,
    Right,
    TopLeft,
    TopRight,
    BottomLeft,
    BottomRight,
}

impl RegionLabel {
    pub const ALL: [RegionLabel; 9] = [
        RegionLabel::Center,
        RegionLabel::Top,
        RegionLabel::Bottom,
        RegionLabel::Left,
        RegionLabel::Right,
        RegionLabel::TopLeft,
        RegionLabel::TopRight,
        RegionLabel::BottomLeft,
        RegionLabel::BottomRight,
    ];

    pub fn as_text(self) -> &'static str {
        match self {
            RegionLabel::Center => "center",
            RegionLabel::Top => "top",
            RegionLabel::Bottom => "bottom",
            RegionLabel::Left => "left",
            RegionLabel::Right => "right",
            RegionLabel::TopLeft => "top-left",
            RegionLabel::TopRight => "top-right",
            RegionLabel::BottomLeft => "bottom-left",
            RegionLabel::BottomRight => "bottom-right",
        }
    }

    pub fn is_corner(self) -> bool {
        matches!(
            self,
            RegionLabel::TopLeft
                | RegionLabel::TopRight
                | RegionLabel::BottomLeft
                | RegionLabel::BottomRight
        )
    }

    pub fn is_edge(self) -> bool {
        matches!(
            self,
            RegionLabel::Top | RegionLabel::Bottom | RegionLabel::Left | RegionLabel::Right
        )
    }
}

/// Sector granularity for [`direction_sector`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SectorMode {
    /// Four quadrant labels, split exactly at the axes.
    Four,
    /// Four cardinal sectors of `2 * cardinal_half_width` plus four diagonal sectors.
    Eight,
}

/// Angular calibration for the 8-way sector split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectorConfig {
    /// Half-width in degrees of each cardinal sector (top/bottom/left/right).
    pub cardinal_half_width: f64,
    /// Scene generation rejects relative vectors closer than this (degrees)
    /// to any sector boundary.
    pub epsilon_exclusion: f64,
}

impl Default for SectorConfig {
    fn default() -> Self {
        // 11.25 degrees per half-width gives roughly 6% per cardinal label and
        // 19% per diagonal label for uniformly sampled point pairs.
        SectorConfig {
            cardinal_half_width: 11.25,
            epsilon_exclusion: 1.0,
        }
    }
}

impl SectorConfig {
    pub fn validate(&self) -> bool {
        self.cardinal_half_width > 0.0
            && self.cardinal_half_width < 45.0
            && self.epsilon_exclusion >= 0.0
    }
}

/// Relative angle of `b` as seen from `a`, degrees in `[0, 360)`, 0 = right, 90 = top.
pub fn relative_angle_deg(a: Point, b: Point) -> f64 {
    let deg = ((b.y - a.y) as f64).atan2((b.x - a.x) as f64).to_degrees();
    deg.rem_euclid(360.0)
}

/// Circular distance in degrees between two angles.
fn angle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(360.0);
    d.min(360.0 - d)
}

/// Label of the sector containing the vector from `a` to `b`.
pub fn direction_sector(
    a: Point,
    b: Point,
    mode: SectorMode,
    cfg: &SectorConfig,
) -> Result<DirectionLabel, GeometryError> {
    if a == b {
        return Err(GeometryError::DegenerateInput);
    }
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    match mode {
        SectorMode::Four => {
            if dx == 0 || dy == 0 {
                return Err(GeometryError::AmbiguousAxis);
            }
            Ok(match (dx > 0, dy > 0) {
                (true, true) => DirectionLabel::TopRight,
                (false, true) => DirectionLabel::TopLeft,
                (true, false) => DirectionLabel::BottomRight,
                (false, false) => DirectionLabel::BottomLeft,
            })
        }
        SectorMode::Eight => {
            let angle = relative_angle_deg(a, b);
            let hw = cfg.cardinal_half_width;
            for (center, label) in [
                (0.0, DirectionLabel::Right),
                (90.0, DirectionLabel::Top),
                (180.0, DirectionLabel::Left),
                (270.0, DirectionLabel::Bottom),
            ] {
                if angle_distance(angle, center) <= hw {
                    return Ok(label);
                }
            }
            Ok(if angle < 90.0 {
                DirectionLabel::TopRight
            } else if angle < 180.0 {
                DirectionLabel::TopLeft
            } else if angle < 270.0 {
                DirectionLabel::BottomLeft
            } else {
                DirectionLabel::BottomRight
            })
        }
    }
}

/// True if the relative angle sits within `eps` degrees of any sector boundary
/// (the axes themselves, or the cardinal/diagonal splits at axis +/- half-width).
pub fn near_sector_boundary(a: Point, b: Point, cfg: &SectorConfig) -> bool {
    let angle = relative_angle_deg(a, b);
    let eps = cfg.epsilon_exclusion;
    for k in 0..4 {
        let axis = 90.0 * k as f64;
        if angle_distance(angle, axis) < eps
            || angle_distance(angle, axis + cfg.cardinal_half_width) < eps
            || angle_distance(angle, axis - cfg.cardinal_half_width) < eps
        {
            return true;
        }
    }
    false
}

pub fn euclidean_distance(a: Point, b: Point) -> f64 {
    let dx = (b.x - a.x) as f64;
    let dy = (b.y - a.y) as f64;
    dx.hypot(dy)
}

/// Assigns `p` to one of nine regions. Bands are half-open (`[lower, upper)`)
/// so boundary points resolve deterministically.
pub fn region_of(p: Point, lower: f64, upper: f64) -> RegionLabel {
    debug_assert!(0.0 < lower && lower < upper && upper < 1.0);
    let lo = lower * CANVAS_SIZE as f64;
    let hi = upper * CANVAS_SIZE as f64;
    // 0 = low band, 1 = middle, 2 = high
    let band = |v: i32| -> u8 {
        let v = v as f64;
        if v < lo {
            0
        } else if v < hi {
            1
        } else {
            2
        }
    };
    match (band(p.x), band(p.y)) {
        (1, 1) => RegionLabel::Center,
        (1, 2) => RegionLabel::Top,
        (1, 0) => RegionLabel::Bottom,
        (0, 1) => RegionLabel::Left,
        (2, 1) => RegionLabel::Right,
        (0, 2) => RegionLabel::TopLeft,
        (2, 2) => RegionLabel::TopRight,
        (0, 0) => RegionLabel::BottomLeft,
        (2, 0) => RegionLabel::BottomRight,
        _ => unreachable!(),
    }
}

/// Default region thresholds (40% / 60% along both axes).
pub const REGION_LOWER: f64 = 0.4;
pub const REGION_UPPER: f64 = 0.6;

pub fn region_of_default(p: Point) -> RegionLabel {
    region_of(p, REGION_LOWER, REGION_UPPER)
}

/// Stable ranking of point pairs by Euclidean distance.
#[derive(Debug, Clone, PartialEq)]
pub struct PairRanking {
    /// Indices into the input slice, sorted ascending by distance.
    pub order: Vec<usize>,
    pub distances: Vec<f64>,
    pub argmin: usize,
    pub argmax: usize,
}

/// Ranks pairs by distance. Errors with [`GeometryError::TieDetected`] when two
/// pair distances differ by less than one canvas unit, so callers can resample.
pub fn rank_pairs_by_distance(pairs: &[(Point, Point)]) -> Result<PairRanking, GeometryError> {
    if pairs.len() < 2 {
        return Err(GeometryError::TooFewPairs(pairs.len()));
    }
    let distances: Vec<f64> = pairs.iter().map(|&(a, b)| euclidean_distance(a, b)).collect();
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    order.sort_by(|&i, &j| distances[i].partial_cmp(&distances[j]).unwrap().then(i.cmp(&j)));
    for w in order.windows(2) {
        let (lo, hi) = (distances[w[0]], distances[w[1]]);
        if hi - lo < 1.0 {
            return Err(GeometryError::TieDetected(lo, hi));
        }
    }
    Ok(PairRanking {
        argmin: order[0],
        argmax: *order.last().unwrap(),
        order,
        distances,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg() -> SectorConfig {
        SectorConfig::default()
    }

    #[test]
    fn diagonal_vector_four_way() {
        let got = direction_sector(Point::new(200, 200), Point::new(800, 800), SectorMode::Four, &cfg());
        assert_eq!(got, Ok(DirectionLabel::TopRight));
    }

    #[test]
    fn on_axis_eight_way_is_cardinal() {
        let got = direction_sector(Point::new(500, 500), Point::new(900, 500), SectorMode::Eight, &cfg());
        assert_eq!(got, Ok(DirectionLabel::Right));
    }

    #[test]
    fn near_axis_within_half_width() {
        // atan2(50, 400) ~= 7.1 degrees < 11.25
        let angle = (50f64).atan2(400.0).to_degrees();
        assert!(angle < cfg().cardinal_half_width);
        let got = direction_sector(Point::new(500, 500), Point::new(900, 550), SectorMode::Eight, &cfg());
        assert_eq!(got, Ok(DirectionLabel::Right));
    }

    #[test]
    fn degenerate_and_axis_errors() {
        let p = Point::new(3, 4);
        assert_eq!(
            direction_sector(p, p, SectorMode::Eight, &cfg()),
            Err(GeometryError::DegenerateInput)
        );
        assert_eq!(
            direction_sector(Point::new(0, 0), Point::new(5, 0), SectorMode::Four, &cfg()),
            Err(GeometryError::AmbiguousAxis)
        );
    }

    #[test]
    fn distance_examples() {
        assert_eq!(euclidean_distance(Point::new(0, 0), Point::new(300, 400)), 500.0);
        assert_eq!(euclidean_distance(Point::new(123, 456), Point::new(123, 456)), 0.0);
        let d = euclidean_distance(Point::new(0, 0), Point::new(1000, 1000));
        assert!((d - 1414.2136).abs() < 1e-3);
    }

    #[test]
    fn region_examples() {
        assert_eq!(region_of_default(Point::new(500, 500)), RegionLabel::Center);
        assert_eq!(region_of_default(Point::new(100, 900)), RegionLabel::TopLeft);
        assert_eq!(region_of_default(Point::new(500, 50)), RegionLabel::Bottom);
        // boundary is half-open: 400 belongs to the middle band
        assert_eq!(region_of_default(Point::new(400, 500)), RegionLabel::Center);
    }

    #[test]
    fn ranking_reports_extremes() {
        // hand oracle: d0 = 500 (3-4-5), d1 = 300, d2 = 600
        let a = Point::new(0, 0);
        let b = Point::new(300, 400);
        let c = Point::new(300, 0);
        let pairs = [(a, b), (a, c), (b, Point::new(900, 400))];
        let r = rank_pairs_by_distance(&pairs).unwrap();
        assert_eq!(r.order, vec![1, 0, 2]);
        assert_eq!(r.argmin, 1);
        assert_eq!(r.argmax, 2);
        assert!((r.distances[2] - 600.0).abs() < 1e-9);
    }

    #[test]
    fn ranking_tie_detected_on_square() {
        let sq = [
            (Point::new(0, 0), Point::new(0, 500)),
            (Point::new(500, 0), Point::new(500, 500)),
        ];
        assert!(matches!(
            rank_pairs_by_distance(&sq),
            Err(GeometryError::TieDetected(_, _))
        ));
    }

    #[test]
    fn ranking_two_pairs() {
        let pairs = [
            (Point::new(0, 0), Point::new(10, 0)),
            (Point::new(0, 0), Point::new(1000, 0)),
        ];
        let r = rank_pairs_by_distance(&pairs).unwrap();
        assert_eq!(r.argmin, 0);
        assert_eq!(r.argmax, 1);
    }

    proptest! {
        #[test]
        fn eight_way_reflection(ax in 0..=1000, ay in 0..=1000, bx in 0..=1000, by in 0..=1000) {
            let (a, b) = (Point::new(ax, ay), Point::new(bx, by));
            prop_assume!(a != b);
            let fwd = direction_sector(a, b, SectorMode::Eight, &cfg()).unwrap();
            let bwd = direction_sector(b, a, SectorMode::Eight, &cfg()).unwrap();
            prop_assert_eq!(fwd.opposite(), bwd);
        }

        #[test]
        fn four_way_matches_diagonal_quadrant(ax in 0..=1000, ay in 0..=1000, bx in 0..=1000, by in 0..=1000) {
            let (a, b) = (Point::new(ax, ay), Point::new(bx, by));
            prop_assume!(a != b);
            let eight = direction_sector(a, b, SectorMode::Eight, &cfg()).unwrap();
            if eight.is_diagonal() {
                let four = direction_sector(a, b, SectorMode::Four, &cfg()).unwrap();
                prop_assert_eq!(four, eight);
            }
        }

        #[test]
        fn region_partitions_canvas(x in 0..=1000, y in 0..=1000) {
            let p = Point::new(x, y);
            let hits = RegionLabel::ALL.iter().filter(|&&r| region_of_default(p) == r).count();
            prop_assert_eq!(hits, 1);
        }

        #[test]
        fn triangle_inequality(ax in 0..=1000, ay in 0..=1000, bx in 0..=1000, by in 0..=1000,
                               cx in 0..=1000, cy in 0..=1000) {
            let (a, b, c) = (Point::new(ax, ay), Point::new(bx, by), Point::new(cx, cy));
            let lhs = euclidean_distance(a, c);
            let rhs = euclidean_distance(a, b) + euclidean_distance(b, c);
            prop_assert!(lhs <= rhs + 1e-9);
        }
    }
}
