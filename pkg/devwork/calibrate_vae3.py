"""VAE-only calibration with the new corpus params and training defaults."""
import sys
import time
from pathlib import Path

import numpy as np
import torch

sys.path.insert(0, "/root/pkg/devwork")
from calibrate_e2e import CLASSES, sine_clip

from tadiff import audio, augment, data, llm, vae

OUT = Path("/root/pkg/devwork/e2e_v3")
OUT.mkdir(parents=True, exist_ok=True)
rng = np.random.default_rng(7)
mp = audio.MelParams()

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
params = augment.CompositionParams(max_duration=4.0, gap_range=(-0.3, 0.8),
                                   mix_gain_db_range=(-2.0, 0.0), seed=100)
records = augment.augment_batch(db, 300, params, llm.OfflineTemplateClient(), OUT / "aug")
data.write_manifest(OUT / "aug" / "manifest.jsonl", records)

recs, _ = data.load_manifest(OUT / "aug" / "manifest.jsonl")
batch = data.collate(recs, mp)
mels = [batch.mels[i][:, batch.frame_masks[i]].astype(np.float32)
        for i in range(len(batch.captions))]
print("corpus ready; T range", min(m.shape[1] for m in mels), max(m.shape[1] for m in mels), flush=True)

steps = int(sys.argv[1]) if len(sys.argv) > 1 else 3000
vcfg = vae.VAEConfig(channels=28, gan_start_step=10**9)
t0 = time.time()
model, hist = vae.train_vae(mels, vcfg, mp, steps=steps, batch_size=8, lr=2.5e-3,
                            seed=0, log_every=0, lr_decay=True)
l1s = [h["recon_l1"] for h in hist]
for i in range(0, len(l1s), 500):
    print(f"steps {i:5d}+: window L1 {np.mean(l1s[i:i+500]):.4f}", flush=True)
print(f"{steps} steps in {(time.time()-t0)/60:.1f} min", flush=True)

with torch.no_grad():
    errs_mean, errs_sample = [], []
    gen = torch.Generator().manual_seed(0)
    for m in mels:
        x = torch.from_numpy(m)[None]
        d = model.encode(x)
        errs_mean.append(float((model.decode(d.mean) - x).abs().mean()))
        errs_sample.append(float((model.decode(d.sample(gen)) - x).abs().mean()))
print(f"train L1 mean-decode {np.mean(errs_mean):.4f}  sampled-decode {np.mean(errs_sample):.4f}", flush=True)
model.latent_scale.fill_(vae.compute_latent_scale(model, mels, seed=0))
print("latent scale:", float(model.latent_scale), flush=True)
vae.save_vae_checkpoint(OUT / "vae.pt", model, mp, step=steps)
