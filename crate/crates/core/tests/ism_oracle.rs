//! Image-source renderings checked against their known geometry.

use srir_core::doa::{piv_broadband_doa, tdoa_ls_doa, DoaConfig};
use srir_core::geometry::{builtin_array, reference_hrir_set, spherical_head_set};
use srir_core::ism::{
    apl_room_scene, apl_room_settings, enumerate_images, render_array_srir, render_center_omni, render_ideal_foa,
    render_reference_brir, table_i_positions, Receiver, RenderSettings,
};
use srir_core::math::Vec3;
use srir_core::metrics::{itd, t30_mid};

fn peak_index(x: &[f64]) -> usize {
    (0..x.len()).fold(0, |b, i| if x[i].abs() > x[b].abs() { i } else { b })
}

#[test]
fn direct_sound_doa_for_table_positions() {
    let geometry = builtin_array("om6").unwrap();
    let settings = RenderSettings { length: 4800, ..apl_room_settings() };
    let config = DoaConfig::default();
    for pos in table_i_positions() {
        let scene = apl_room_scene(&pos, Receiver::Array { geometry: geometry.clone() });
        let images = enumerate_images(&scene).unwrap();
        let srir = render_array_srir(&images, &geometry, &settings).unwrap().response;
        let n = peak_index(render_center_omni(&images, &settings).unwrap().response.samples());
        let truth = pos.direction();
        let tdoa = tdoa_ls_doa(&srir, &geometry, &config).unwrap();
        let e_tdoa = tdoa.direction(n).unwrap().angle_to(truth).to_degrees();
        let foa = render_ideal_foa(&images, &settings).unwrap().response;
        let piv = piv_broadband_doa(&foa, &config).unwrap();
        let e_piv = piv.direction(n).unwrap().angle_to(truth).to_degrees();
        println!("{:<18} tdoa {e_tdoa:.3} deg  piv {e_piv:.3} deg", pos.label);
        assert!(e_tdoa <= 2.0, "{}: tdoa {e_tdoa}", pos.label);
        assert!(e_piv <= 1.0, "{}: piv {e_piv}", pos.label);
    }
}

#[test]
fn frontal_reference_has_no_itd() {
    let hrirs = reference_hrir_set(48_000).unwrap();
    let scene = apl_room_scene(&table_i_positions()[0], Receiver::Binaural);
    let images = enumerate_images(&scene).unwrap();
    let settings = RenderSettings { length: 4800, ..apl_room_settings() };
    let brir = render_reference_brir(&images, &hrirs, &settings).unwrap().response;
    assert!(itd(&brir).unwrap().abs() < 20.0);
}

#[test]
fn decay_never_shortens_with_higher_coefficients() {
    let mut scene = apl_room_scene(&table_i_positions()[1], Receiver::IdealFoa);
    let settings = apl_room_settings();
    let mut last = 0.0;
    for beta in [0.6, 0.7, 0.8] {
        scene.room.reflection_coefficients = [beta; 6];
        let t = t30_mid(&render_center_omni(&enumerate_images(&scene).unwrap(), &settings).unwrap().response).unwrap();
        assert!(t >= last, "beta {beta}: {t} < {last}");
        last = t;
    }
    // Raising one wall alone also lengthens the decay.
    scene.room.reflection_coefficients = [0.7; 6];
    let base = t30_mid(&render_center_omni(&enumerate_images(&scene).unwrap(), &settings).unwrap().response).unwrap();
    scene.room.reflection_coefficients[4] = 0.9;
    let more = t30_mid(&render_center_omni(&enumerate_images(&scene).unwrap(), &settings).unwrap().response).unwrap();
    assert!(more >= base);
}

#[test]
fn order_zero_reference_is_delayed_scaled_hrir() {
    let dirs = [Vec3::FRONT, Vec3::new(0.0, 1.0, 0.0), Vec3::new(-1.0, 0.0, 0.0), Vec3::new(0.0, -1.0, 0.0)];
    let hrirs = spherical_head_set(&dirs, 48_000, 256).unwrap();
    let pos = table_i_positions()[0];
    let mut scene = apl_room_scene(&pos, Receiver::Binaural);
    scene.room.max_order = 0;
    let images = enumerate_images(&scene).unwrap();
    let brir = render_reference_brir(&images, &hrirs, &RenderSettings::new(48_000, 2048)).unwrap().response;
    let delay = pos.distance_m / 343.0 * 48_000.0;
    let n = peak_index(brir.left().samples());
    let h = peak_index(hrirs.pair(0).left().samples());
    assert!((n as f64 - (delay + h as f64)).abs() <= 1.0);
    let ratio = brir.left().energy() / hrirs.pair(0).left().energy();
    assert!((ratio * pos.distance_m * pos.distance_m - 1.0).abs() < 0.02);
}
