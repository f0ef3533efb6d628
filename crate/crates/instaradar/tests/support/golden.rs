//! Golden-file checks shared by the acceptance suite: every persisted
//! format is written from fixed in-memory content and compared byte for
//! byte against the fixtures in tests/fixtures/. Set GOLDEN_REGEN=1 to
//! rewrite the fixtures instead of comparing.

use instaradar::bev::{read_bev, write_bev, BevGrid, BevGridSpec};
use instaradar::depth::{SparseDepthMap, DEFAULT_DEPTH_CAP};
use instaradar::eval::{read_depth_png, write_depth_png};
use instaradar::geom::{Pose, SensorCalibration};
use instaradar::masks::{load_masks, write_masks, InstanceMaskSet};
use instaradar::radar::{parse_sweep, write_sweep, RadarPoint, RadarSweep};
use nalgebra::Vector3;
use std::path::{Path, PathBuf};

fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn check_bytes(name: &str, produced: &Path) {
    let fixture = fixtures_dir().join(name);
    let got = std::fs::read(produced).unwrap();
    if std::env::var_os("GOLDEN_REGEN").is_some() {
        std::fs::create_dir_all(fixtures_dir()).unwrap();
        std::fs::write(&fixture, &got).unwrap();
        return;
    }
    let want = std::fs::read(&fixture)
        .unwrap_or_else(|e| panic!("missing fixture {}: {e}", fixture.display()));
    assert_eq!(got, want, "{name} is not byte-identical to its fixture");
}

fn golden_depth_map() -> SparseDepthMap {
    let mut map = SparseDepthMap::new(8, 6, DEFAULT_DEPTH_CAP);
    map.set(0, 0, 1.0 / 256.0).unwrap(); // smallest representable stored value
    map.set(3, 1, 1.5).unwrap();
    map.set(7, 2, 80.0).unwrap(); // at the cap
    map.set(4, 4, 12.3456789).unwrap(); // quantized on write
    map.set(6, 5, 0.4).unwrap();
    map
}

fn golden_masks() -> InstanceMaskSet {
    let mut labels = vec![0u16; 8 * 6];
    for u in 1..4u32 {
        for v in 1..3u32 {
            labels[(v * 8 + u) as usize] = 2;
        }
    }
    labels[5 * 8 + 7] = 41;
    InstanceMaskSet::from_labels(8, 6, labels).unwrap()
}

fn golden_sweep() -> RadarSweep {
    RadarSweep {
        points: vec![
            RadarPoint {
                position: Vector3::new(1.0, -2.5, 0.0),
                velocity: [0.5, -0.25],
                rcs: 3.5,
                timestamp_us: 1_000_000,
            },
            RadarPoint {
                position: Vector3::new(1.0 / 3.0, 2e-9, 79.999),
                velocity: [0.0, 0.0],
                rcs: -12.75,
                timestamp_us: 1_000_123,
            },
        ],
        sensor_to_ego: Pose::from_translation(Vector3::new(0.25, 0.0, -1.5)),
        ego_to_global: Pose::new(0.0, 0.0, 0.7071067811865476, 0.7071067811865476, Vector3::new(100.0, -3.0, 0.5))
            .unwrap(),
        timestamp_us: 1_000_000,
    }
}

fn golden_calib() -> SensorCalibration {
    SensorCalibration {
        intrinsics: Some([300.0, 300.0, 176.0, 64.0]),
        width: Some(352),
        height: Some(128),
        sensor_to_ego: Pose::identity().to_row_major(),
        ego_to_global: Pose::from_translation(Vector3::new(10.0, 0.0, 0.0)).to_row_major(),
        timestamp_us: 2_000_000,
    }
}

fn golden_grid() -> BevGrid {
    let spec = BevGridSpec {
        x_min: -1.6,
        x_max: 1.6,
        y_min: -1.2,
        y_max: 1.2,
        resolution: 0.8,
        channels: 2,
    };
    let mut grid = BevGrid::zeros(spec).unwrap();
    for (i, v) in grid.data.iter_mut().enumerate() {
        *v = (i as f64) * 0.125 - 1.0;
    }
    grid
}

pub fn check_all() {
    let tmp = tempfile::tempdir().unwrap();

    let depth_path = tmp.path().join("depth.png");
    write_depth_png(&depth_path, &golden_depth_map()).unwrap();
    check_bytes("depth.png", &depth_path);
    let round = read_depth_png(&depth_path, DEFAULT_DEPTH_CAP).unwrap();
    assert_eq!(round.valid_count(), golden_depth_map().valid_count());
    for (u, v, d) in golden_depth_map().iter_valid() {
        assert!((round.get(u, v).unwrap() - d).abs() <= 1.0 / 512.0);
    }

    let masks_path = tmp.path().join("masks.png");
    write_masks(&masks_path, &golden_masks()).unwrap();
    check_bytes("masks.png", &masks_path);
    assert_eq!(load_masks(&masks_path, (8, 6)).unwrap(), golden_masks());

    let sweep_path = tmp.path().join("sweep_00.csv");
    write_sweep(&sweep_path, &golden_sweep()).unwrap();
    check_bytes("sweep_00.csv", &sweep_path);
    check_bytes("sweep_00.json", &tmp.path().join("sweep_00.json"));
    let parsed = parse_sweep(&sweep_path).unwrap();
    assert_eq!(parsed.points, golden_sweep().points);
    assert_eq!(parsed.timestamp_us, golden_sweep().timestamp_us);

    let calib_path = tmp.path().join("calib.json");
    std::fs::write(&calib_path, serde_json::to_string_pretty(&golden_calib()).unwrap()).unwrap();
    check_bytes("calib.json", &calib_path);
    let back: SensorCalibration =
        serde_json::from_str(&std::fs::read_to_string(&calib_path).unwrap()).unwrap();
    assert_eq!(back.sensor_to_ego, golden_calib().sensor_to_ego);
    assert_eq!(back.intrinsics, golden_calib().intrinsics);

    let bev_path = tmp.path().join("grid.bevg");
    write_bev(&bev_path, &golden_grid()).unwrap();
    check_bytes("grid.bevg", &bev_path);
    let grid = read_bev(&bev_path).unwrap();
    assert_eq!(grid.nx, 4);
    assert_eq!(grid.ny, 3);
    assert_eq!(grid.spec.channels, 2);
    for (a, b) in grid.data.iter().zip(golden_grid().data.iter()) {
        assert_eq!(*a as f32, *b as f32); // format stores f32
    }
}
