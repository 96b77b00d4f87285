//! Thin-lens geometry: image distance, blur circles over a depth range, and
//! the focal length that hits a prescribed blur budget.

use defocus_optics::geometry::{
    coc_from_depth, depth_from_coc, depth_grid, derive_optics, focal_for_cmax, max_coc,
    CameraConfig,
};

fn main() {
    let config = CameraConfig {
        focal_length: 15e-3,
        f_number: 1.4,
        focus_distance: 1.0,
        pixel_pitch: 5.6e-6,
    };
    let optics = derive_optics(&config).unwrap();
    println!("f = 15 mm at f/1.4 focused at 1 m:");
    println!("  image distance   {:.4} mm", optics.image_distance * 1e3);
    println!("  aperture         {:.4} mm", optics.aperture_diameter * 1e3);
    println!("  blur scale C_o   {:.2} um", optics.in_focus_blur_scale * 1e6);
    println!("  A_R per unit C   {:.6}", optics.ar_per_coc);

    println!("\nblur circle across +-10% of the focus distance:");
    for &offset in &depth_grid(config.focus_distance, 0.1, 5).unwrap().offsets {
        let state = coc_from_depth(&config, offset).unwrap();
        let back = depth_from_coc(&config, state.coc_diameter).unwrap();
        println!(
            "  depth {:+6.2} m -> C = {:+8.3} um ({:+6.3} px), A_R = {:+7.4} um, inverse {:+6.2} m",
            offset,
            state.coc_diameter * 1e6,
            state.coc_diameter / config.pixel_pitch,
            state.wavefront_coefficient * 1e6,
            back,
        );
    }
    println!(
        "\nmax |C| over the range: {:.3} um",
        max_coc(&config, 0.1).unwrap() * 1e6
    );

    println!("\nfocal lengths hitting a 3-pixel blur budget (P = 5.6 um, eta = 0.1):");
    for d_f in [1.0, 10.0, 100.0] {
        for f_n in [1.0, 2.0, 4.0] {
            let f = focal_for_cmax(d_f, f_n, 3.0 * 5.6e-6, 0.1).unwrap();
            print!("  d_f {d_f:>5} m f/{f_n}: {:6.2} mm", f * 1e3);
        }
        println!();
    }
}
