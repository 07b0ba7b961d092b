"""Tool likelihoods as a search heuristic.

Breadth-first search over symbolic actions blows up quickly. Letting the
model's tool scores set action costs keeps the search on plausible tools.

Run: python demos/03_guided_planning.py   (about two minutes)
"""
from toolnet.dataset import augment, generate_corpus, resolve
from toolnet.model import AblationConfig
from toolnet.pipeline import planner_pairs
from toolnet.planner import bfs, guided, model_predictor
from toolnet.trainer import TrainConfig, provider_for, train

corpus = augment(generate_corpus(domains=["home"]))
ab = AblationConfig.row("+W")
model, _ = train(corpus, "home", TrainConfig(epochs=60), ab)
predict = model_predictor(model, provider_for(ab))

print(f"{'goal':42s} {'scene':>5s} {'bfs nodes':>9s} {'guided':>7s} {'ebf bfs':>7s} {'ebf g':>6s}")
for g, ref in planner_pairs(corpus, "home", 6, 5):
    w = resolve(ref)
    u, gd = bfs(w, g), guided(w, g, predict)
    print(f"{' '.join(g.text)[:42]:42s} {ref.seed:5d} {u.nodes_expanded:9d} "
          f"{gd.nodes_expanded:7d} {u.ebf:7.2f} {gd.ebf:6.2f}")

print("\nguided plan for the last pair:")
for a in gd.plan:
    print("  ", a)
