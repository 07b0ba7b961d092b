"""A first look at the symbolic world: one home scene, one goal, the teacher's plans.

Run: python demos/01_scenes_and_teachers.py
"""
from toolnet.goals import GOALS
from toolnet.scenes import make_scene
from toolnet.teacher import acceptable_tools, teach_all
from toolnet.world import replay, satisfied

w = make_scene("home", 0)
print(f"home scene 0: {len(w.nodes)} objects, {len(w.edges)} relations")
print("tools present:", sorted({n.cls for n in w.nodes if n.is_tool}))

# Goal 1 of the home domain and every strategy the scripted teacher knows for it.
g = GOALS["home"][0]
print("\ngoal:", " ".join(g.text))
for plan in teach_all(g, w):
    end = replay(w, plan.actions)
    tools = ", ".join(sorted(plan.tools)) or "no tool"
    print(f"  {len(plan.actions):2d} actions, cost {plan.cost:5.2f}, uses {tools:17s} "
          f"goal reached: {satisfied(g, end)}")

print("acceptable answers in this scene:", sorted(acceptable_tools(g, w)))

# The shortest plan, action by action.
best = min(teach_all(g, w), key=lambda p: p.cost)
print("\ncheapest plan:")
for a in best.actions:
    print("  ", a)
