//! Scratch diagnostic for masked pack/unpack recovery rates.

use ifswarp::geometry::AffineMap2;
use ifswarp::geometry::MapVariant;
use ifswarp::imaging::{pack_masked, unpack_masked, Picture};
use ifswarp::rng::SplitMix64;
use ifswarp::Ifs2d;
use ifswarp::Rect2d;

fn swap_pair() -> (Ifs2d, Ifs2d) {
    let unit = Rect2d::unit();
    let f = Ifs2d::new(
        vec![
            MapVariant::Affine(AffineMap2::new(0.0, 1.0, -0.6, 0.0, 0.0, 0.6)),
            MapVariant::Affine(AffineMap2::new(0.0, 1.0, 0.6, 0.0, 0.0, 0.4)),
        ],
        unit,
        0.6f64.sqrt(),
    )
    .unwrap();
    let g = Ifs2d::new(
        vec![
            MapVariant::Affine(AffineMap2::new(0.0, 1.0, -0.5, 0.0, 0.0, 0.5)),
            MapVariant::Affine(AffineMap2::new(0.0, 1.0, 0.5, 0.0, 0.0, 0.5)),
        ],
        unit,
        0.5f64.sqrt(),
    )
    .unwrap();
    (f, g)
}

fn random_picture(side: usize, seed: u64) -> Picture {
    let mut rng = SplitMix64::new(seed);
    let mut pic = Picture::new(side, side);
    for row in 0..side {
        for col in 0..side {
            let bits = rng.next_u64();
            pic.put(
                col,
                row,
                [bits as u8, (bits >> 8) as u8, (bits >> 16) as u8, 255],
            );
        }
    }
    pic
}

fn smooth_picture(side: usize) -> Picture {
    let mut pic = Picture::new(side, side);
    for row in 0..side {
        for col in 0..side {
            let u = (col as f64 + 0.5) / side as f64;
            let v = 1.0 - (row as f64 + 0.5) / side as f64;
            let r = (255.0 * u) as u8;
            let g = (255.0 * v) as u8;
            let b = (255.0 * (0.5 + 0.5 * ((8.0 * u).sin() * (8.0 * v).cos()))) as u8;
            pic.put(col, row, [r, g, b, 255]);
        }
    }
    pic
}

fn blocky_picture(side: usize, block: usize, seed: u64) -> Picture {
    let mut rng = SplitMix64::new(seed);
    let blocks = side.div_ceil(block);
    let mut colors = Vec::new();
    for _ in 0..blocks * blocks {
        let bits = rng.next_u64();
        colors.push([bits as u8, (bits >> 8) as u8, (bits >> 16) as u8, 255]);
    }
    let mut pic = Picture::new(side, side);
    for row in 0..side {
        for col in 0..side {
            pic.put(col, row, colors[(row / block) * blocks + col / block]);
        }
    }
    pic
}

fn recovery(src: &Picture, out: &Picture) -> f64 {
    let mut hit = 0usize;
    let mut total = 0usize;
    for row in 0..src.height() {
        for col in 0..src.width() {
            total += 1;
            if src.get(col, row) == out.get(col, row) {
                hit += 1;
            }
        }
    }
    hit as f64 / total as f64
}

fn run(label: &str, src: Picture, res: usize, ss: usize) {
    let (f, g) = swap_pair();
    let t0 = std::time::Instant::now();
    let (canvas, collided) =
        pack_masked(&[(src.clone(), 0.5f64)], &f, &g, res, ss).unwrap();
    let out = unpack_masked(&canvas, 0.5, &f, &g, src.width()).unwrap();
    let rate = recovery(&src, &out);
    println!(
        "{label}: src {}^2 canvas {}^2 ss{} -> recovery {:.4} collided {:.4} ({:?})",
        src.width(),
        res,
        ss,
        rate,
        collided,
        t0.elapsed()
    );
}

fn two_source(res: usize, block: usize) {
    let (f, g) = swap_pair();
    let a = blocky_picture(res, block, 5);
    let b = blocky_picture(res, block, 23);
    let (canvas, collided) = pack_masked(
        &[(a.clone(), 0.44f64), (b.clone(), 0.56f64)],
        &f,
        &g,
        res,
        4,
    )
    .unwrap();
    for (label, src, p) in [("A", &a, 0.44), ("B", &b, 0.56)] {
        let out = unpack_masked(&canvas, p, &f, &g, res).unwrap();
        let mut hit = 0usize;
        let mut nonwhite = 0usize;
        for row in 0..res {
            for col in 0..res {
                let got = out.get(col, row);
                if got == [255, 255, 255, 255] {
                    continue;
                }
                nonwhite += 1;
                if got == src.get(col, row) {
                    hit += 1;
                }
            }
        }
        println!(
            "two-source {label} {res}^2 block{block}: nonwhite {:.4} recovery {:.4} collided {:.4}",
            nonwhite as f64 / (res * res) as f64,
            hit as f64 / nonwhite as f64,
            collided
        );
    }
}

fn main() {
    run("random  96/96 ", random_picture(96, 11), 96, 4);
    run("random  96/192", random_picture(96, 11), 192, 4);
    run("smooth  96/96 ", smooth_picture(96), 96, 4);
    run("blocky  96/96 ", blocky_picture(96, 8, 5), 96, 4);
    run("random 512/512", random_picture(512, 11), 512, 4);
    run("smooth 512/512", smooth_picture(512), 512, 4);
    run("blocky16 512/512", blocky_picture(512, 16, 5), 512, 4);
    run("blocky32 512/512", blocky_picture(512, 32, 5), 512, 4);
    run("blocky64 512/512", blocky_picture(512, 64, 5), 512, 4);
    run("smooth 512/1024", smooth_picture(512), 1024, 4);
    two_source(512, 32);
    two_source(512, 64);
}
