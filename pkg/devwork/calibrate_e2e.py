"""Dev calibration for the toy end-to-end pipeline (acceptance criterion 9).

Builds the sine event corpus, trains the miniature VAE and LDM, and
measures band accuracy, printing timing for each phase.
"""
import json
import sys
import time
from pathlib import Path

import numpy as np
import torch

from tadiff import audio, augment, captions, data, diffusion, llm, text, vae

OUT = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("/root/pkg/devwork/e2e")
OUT.mkdir(parents=True, exist_ok=True)

CLASSES = [("lowtone", 220.0), ("midtone", 1100.0), ("hightone", 4400.0)]
SR = 16000


def sine_clip(freq, dur, amp, rng):
    n = int(dur * SR)
    t = np.arange(n) / SR
    env = np.minimum(1.0, np.minimum(t, (n / SR) - t) / 0.05)
    return np.sin(2 * np.pi * freq * t) * amp * env


def band_bins(freq, params):
    fb = audio.mel_filterbank(params)
    centers = np.array([np.argmax(fb[i]) for i in range(params.n_mels)])
    bin_freqs = np.linspace(0, params.sample_rate / 2, params.n_fft // 2 + 1)
    mel_center_freqs = bin_freqs[centers]
    idx = int(np.argmin(np.abs(mel_center_freqs - freq)))
    return slice(max(0, idx - 3), min(params.n_mels, idx + 4))


def dominant_class(mel_values, slices):
    energies = [np.exp(mel_values[s]).mean() for s in slices]
    return int(np.argmax(energies))


def main():
    t_start = time.time()
    rng = np.random.default_rng(7)
    mp = audio.MelParams()

    # --- event corpus ---
    clip_dir = OUT / "events"
    clip_dir.mkdir(exist_ok=True)
    event_records = []
    for label, freq in CLASSES:
        for k in range(8):
            dur = rng.uniform(1.0, 1.75)
            w = audio.Waveform(sine_clip(freq, dur, 0.4, rng))
            p = clip_dir / f"{label}_{k}.wav"
            audio.write_wav(p, w)
            event_records.append({"label": label, "audio_path": str(p)})
    db = augment.build_event_database(event_records, max_duration=4.0)

    # --- 300 composed pairs ---
    t0 = time.time()
    params = augment.CompositionParams(max_duration=4.0, gap_range=(-0.3, 0.8),
                                       mix_gain_db_range=(-2.0, 0.0), seed=100)
    client = llm.OfflineTemplateClient()
    records = augment.augment_batch(db, 300, params, client, OUT / "aug")
    data.write_manifest(OUT / "aug" / "manifest.jsonl", records)
    print(f"augment: {time.time()-t0:.1f}s", flush=True)

    # --- mels ---
    t0 = time.time()
    recs, _ = data.load_manifest(OUT / "aug" / "manifest.jsonl")
    batch = data.collate(recs, mp)
    mels = [batch.mels[i][:, batch.frame_masks[i]].astype(np.float32)
            for i in range(len(batch.captions))]
    print(f"collate: {time.time()-t0:.1f}s  T range {min(m.shape[1] for m in mels)}-{max(m.shape[1] for m in mels)}", flush=True)

    # --- VAE ---
    t0 = time.time()
    vcfg = vae.VAEConfig(channels=28, gan_start_step=10**9)
    steps = int(sys.argv[2]) if len(sys.argv) > 2 else 3000
    model, hist = vae.train_vae(mels, vcfg, mp, steps=steps, batch_size=8, lr=2.5e-3,
                                seed=0, log_every=0, lr_decay=True)
    l1s = [h["recon_l1"] for h in hist]
    windows = [float(np.mean(l1s[i:i+200])) for i in range(0, len(l1s), 200)]
    print(f"vae {steps} steps: {time.time()-t0:.1f}s  window L1s: {[round(w,3) for w in windows]}", flush=True)
    model.latent_scale.fill_(vae.compute_latent_scale(model, mels, seed=0))
    print("latent scale:", float(model.latent_scale), flush=True)
    vae.save_vae_checkpoint(OUT / "vae.pt", model, mp, step=steps)

    # final train L1 using posterior mean
    with torch.no_grad():
        errs = []
        for m in mels[:64]:
            x = torch.from_numpy(m)[None]
            d = model.encode(x)
            r = model.decode(d.mean)
            errs.append(float((r - x).abs().mean()))
    print("train L1 (mean-decode):", float(np.mean(errs)), flush=True)

    # --- latents ---
    latents = []
    with torch.no_grad():
        for m in mels:
            d = model.encode(torch.from_numpy(m)[None])
            latents.append((d.mean[0].numpy(), d.logvar[0].numpy()))

    # --- LDM ---
    t0 = time.time()
    dcfg = diffusion.DenoiserConfig(hidden=64, heads=4, blocks=2)
    den = diffusion.FFTDenoiser(dcfg)
    main_b = text.HashEmbeddingBackend(output_dim=256)
    temp_b = text.TemporalTransformerBackend(output_dim=64)
    cond = text.TextConditioner(main_b, temp_b)
    sched = diffusion.make_schedule(1000, 20)
    ldm_steps = int(sys.argv[3]) if len(sys.argv) > 3 else 20000
    histl = diffusion.train_ldm(latents, batch.captions, batch.structured_captions,
                                cond, den, sched, float(model.latent_scale),
                                steps=ldm_steps, batch_size=4, lr=4e-4,
                                cond_dropout_p=0.1, seed=0, log_every=0)
    losses = [h["loss"] for h in histl]
    print(f"ldm {ldm_steps} steps: {(time.time()-t0)/60:.1f} min  "
          f"loss first/last500: {np.mean(losses[:500]):.3f}/{np.mean(losses[-500:]):.3f}", flush=True)
    diffusion.save_ldm_checkpoint(OUT / "ldm.pt", den, cond,
                                  {"steps": 1000, "beta_start": 1e-4, "beta_end": 2e-2}, ldm_steps)

    # --- generation accuracy ---
    t0 = time.time()
    slices = [band_bins(f, mp) for _, f in CLASSES]
    results = {}
    for ci, (label, freq) in enumerate(CLASSES):
        sc = captions.default_structured_caption(label)
        caption = augment.naturalize_caption(sc, client)
        hits = 0
        n_gen = 50 if ci == 0 else 12
        for seed in range(n_gen):
            wav, mel, meta = diffusion.generate(
                caption, 4.0, model, den, cond, sched, mp,
                diffusion.GenerationParams(steps=20, scale=4.0, seed=seed,
                                           griffin_lim_iters=8),
                structured_caption=captions.serialize_structured_caption(sc))
            got = dominant_class(audio.mel_spectrogram(wav, mp).values, slices)
            hits += int(got == ci)
        results[label] = (hits, n_gen)
        print(f"class {label}: {hits}/{n_gen}", flush=True)
    print(f"generation: {(time.time()-t0)/60:.1f} min", flush=True)
    print(f"TOTAL: {(time.time()-t_start)/60:.1f} min", flush=True)
    (OUT / "results.json").write_text(json.dumps(results))


if __name__ == "__main__":
    main()
