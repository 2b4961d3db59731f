"""Measure VAE L1 convergence on the composed sine corpus."""
import sys
import time
from pathlib import Path

import numpy as np
import torch

from tadiff import audio, data, vae

OUT = Path("/root/pkg/devwork/e2e_quick")  # reuse the corpus from the quick run
steps = int(sys.argv[1]) if len(sys.argv) > 1 else 4000
bias_init = len(sys.argv) > 2 and sys.argv[2] == "bias"

recs, _ = data.load_manifest(OUT / "aug" / "manifest.jsonl")
batch = data.collate(recs, audio.MelParams())
mels = [batch.mels[i][:, batch.frame_masks[i]].astype(np.float32) for i in range(len(batch.captions))]

vcfg = vae.VAEConfig(channels=28, gan_start_step=10**9)
model = vae.SpectrogramVAE(vcfg)
if bias_init:
    flat_mean = float(np.mean([m.mean() for m in mels]))
    with torch.no_grad():
        model.dec_out.bias.fill_(flat_mean)
    print("bias init to", flat_mean, flush=True)

t0 = time.time()
model, hist = vae.train_vae(mels, vcfg, audio.MelParams(), steps=steps, batch_size=8,
                            lr=1e-3, seed=0, log_every=0, model=model)
l1s = [h["recon_l1"] for h in hist]
for i in range(0, len(l1s), 250):
    print(f"steps {i:5d}-{i+250:5d}: L1 {np.mean(l1s[i:i+250]):.4f}", flush=True)
print(f"{steps} steps in {(time.time()-t0)/60:.1f} min", flush=True)

with torch.no_grad():
    errs = []
    for m in mels[:64]:
        x = torch.from_numpy(m)[None]
        d = model.encode(x)
        errs.append(float((model.decode(d.mean) - x).abs().mean()))
print("train L1 (mean-decode):", float(np.mean(errs)), flush=True)
