"""VAE convergence sweep: betas/lr variants."""
import sys
import time
from pathlib import Path

import numpy as np
import torch

from tadiff import audio, data, vae

OUT = Path("/root/pkg/devwork/e2e_quick")
recs, _ = data.load_manifest(OUT / "aug" / "manifest.jsonl")
batch = data.collate(recs, audio.MelParams())
mels = [batch.mels[i][:, batch.frame_masks[i]].astype(np.float32) for i in range(len(batch.captions))]

lr = float(sys.argv[1])
b1, b2 = float(sys.argv[2]), float(sys.argv[3])
steps = int(sys.argv[4])

# replicate train_vae inline with custom betas
torch.manual_seed(0)
vcfg = vae.VAEConfig(channels=28, gan_start_step=10**9)
model = vae.SpectrogramVAE(vcfg)
flat_mean = float(np.mean([m.mean() for m in mels]))
with torch.no_grad():
    model.dec_out.bias.fill_(flat_mean)
opt = torch.optim.Adam(model.parameters(), lr=lr, betas=(b1, b2), foreach=True)
order = sorted(range(len(mels)), key=lambda i: mels[i].shape[1])
chunks = [order[i:i+8] for i in range(0, len(order), 8)]
mp = audio.MelParams()

t0 = time.time()
l1s = []
for step in range(steps):
    gen = torch.Generator().manual_seed(step)
    chunk = chunks[int(torch.randint(len(chunks), (), generator=gen))]
    xs, mask = vae._pad_mel_batch([mels[i] for i in chunk], mp.log_floor)
    dist = model.encode(xs)
    recon = model.decode(dist.sample(gen))
    loss, parts = vae.vae_loss(xs, recon, dist, None, step, vcfg,
                               frame_mask=mask, latent_mask=mask[:, ::2])
    opt.zero_grad(); loss.backward(); opt.step()
    l1s.append(float(parts["recon_l1"].detach()))
    if (step+1) % 500 == 0:
        print(f"step {step+1}: window L1 {np.mean(l1s[-250:]):.4f}  ({(time.time()-t0)/60:.1f} min)", flush=True)

with torch.no_grad():
    errs = []
    for m in mels[:64]:
        x = torch.from_numpy(m)[None]
        d = model.encode(x)
        errs.append(float((model.decode(d.mean) - x).abs().mean()))
print(f"lr={lr} betas=({b1},{b2}) steps={steps}: mean-decode L1 {np.mean(errs):.4f} "
      f"in {(time.time()-t0)/60:.1f} min", flush=True)
