use std::io::Write;

use traceqa_core::stimulus::{
    generate_profile, profile_to_signal, render_audio, render_visual, signal_to_csv, FrameSequence,
    Modality, ProfileParams,
};
use traceqa_service::Store;

use crate::args::GenArgs;
use crate::error::{create_dir, write_bytes, CliResult};

/// Writes `<id>.profile.json`, `groundtruth.csv` and either `<id>.wav` or
/// `frames/frame_NNNNNN.ppm` under `args.out`.
pub fn run(args: &GenArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let id = args
        .id
        .clone()
        .unwrap_or_else(|| format!("qa-{}-{}", args.modality, args.seed));
    let mut params = ProfileParams::new(id.clone(), args.modality);
    if let Some(d) = args.duration_ms {
        params.duration_ms = d;
    }
    if let Some(n) = args.segments {
        params.segment_count = n;
    }
    if let Some(h) = args.hold_fraction {
        params.hold_fraction = h;
    }
    let profile = generate_profile(args.seed, &params)?;
    let gt = profile_to_signal(&profile, args.rate_hz)?;

    create_dir(&args.out)?;
    let mut written = vec![args.out.join(format!("{id}.profile.json"))];
    write_bytes(&written[0], profile.to_json())?;
    written.push(args.out.join("groundtruth.csv"));
    write_bytes(&written[1], signal_to_csv(&gt))?;

    match args.modality {
        Modality::Auditory => {
            let clip = render_audio(&profile, args.sample_rate)?;
            let path = args.out.join(format!("{id}.wav"));
            write_bytes(&path, clip.to_wav_bytes())?;
            written.push(path);
        }
        Modality::Visual => {
            let frames = render_visual(&profile, args.fps, args.width, args.height)?;
            let dir = args.out.join("frames");
            create_dir(&dir)?;
            for (i, frame) in frames.frames.iter().enumerate() {
                write_bytes(&dir.join(FrameSequence::file_name(i)), frames.ppm_bytes(frame))?;
            }
            written.push(dir);
        }
    }

    if let Some(store) = &args.store {
        Store::open(store)?.put_profile(&profile)?;
    }
    for path in written {
        let _ = writeln!(stdout, "{}", path.display());
    }
    Ok(())
}
