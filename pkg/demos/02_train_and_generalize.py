"""Train the full model on the home domain, then probe it on unseen objects.

The baseline head has one output per known tool, so it cannot name an object
it never saw. The factored head scores any candidate from its word vector,
which is how a crate can stand in for a box.

Run: python demos/02_train_and_generalize.py   (about a minute)
"""
from toolnet.catalog import NO_TOOL
from toolnet.dataset import augment, generate_corpus
from toolnet.gentest import case_input, gen_type, outcomes
from toolnet.model import AblationConfig, argmax_tool
from toolnet.trainer import TrainConfig, provider_for, train

corpus = augment(generate_corpus(domains=["home"]))
print(f"corpus: {len(corpus.plans)} plans after augmentation")

models = {}
for row in ("GGCN", "+W"):
    ab = AblationConfig.row(row)
    models[row], hist = train(corpus, "home", TrainConfig(epochs=60), ab)
    print(f"{row:5s} best epoch {hist.best_epoch}, val acc {hist.best_val:.3f}")

pv = provider_for(AblationConfig.row("+W"))
cases, skipped = gen_type("III", corpus, pv)
only_unseen = [c for c in cases if c.acceptable == set(c.extra_candidates)]
print(f"\nType III cases: {len(cases)}; cases where only the unseen object works: {len(only_unseen)}")

for row, m in models.items():
    ok = outcomes(m, only_unseen, provider_for(m.config))
    print(f"{row:5s} solves {sum(ok)}/{len(ok)} unseen-only cases")

c = only_unseen[0]
m = models["+W"]
dist = m.predict(case_input(c, provider_for(m.config), True))
print(f"\nexample: goal '{' '.join(c.goal.text)}', mutation {c.mutation}")
top = sorted(dist.as_dict().items(), key=lambda kv: -kv[1])[:4]
print("  top scores:", ", ".join(f"{t} {p:.2f}" for t, p in top))
print("  prediction:", argmax_tool(dist), "| acceptable:", sorted(c.acceptable))
print("  no-tool likelihood:", f"{dist[NO_TOOL]:.3f}")
