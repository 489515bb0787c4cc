import random

from codetree.core import RunConfig, Stage
from codetree.policy import select

from conftest import TreeBuilder, brute_force_best, random_tree


def config(drafts=5, depth=3, steps=50):
    return RunConfig(num_drafts=drafts, debug_depth_limit=depth, max_steps=steps)


def test_empty_tree_drafts():
    action = select(TreeBuilder().tree, config(drafts=5))
    assert action.kind is Stage.DRAFT
    assert action.target_id is None


def test_buggy_leaf_within_limit_is_debugged():
    b = TreeBuilder()
    for _ in range(4):
        b.add(metric=0.5)
    buggy_draft = b.add()
    buggy_leaf = b.add(parent=buggy_draft.id)  # debug_depth 1
    action = select(b.tree, config(drafts=5, depth=3))
    assert action.kind is Stage.DEBUG
    assert action.target_id == buggy_leaf.id


def test_all_valid_improves_best():
    b = TreeBuilder()
    metrics = [0.4, 0.6, 0.5, 0.2, 0.3]
    nodes = [b.add(metric=m) for m in metrics]
    action = select(b.tree, config(drafts=5))
    assert action.kind is Stage.IMPROVE
    assert action.target_id == nodes[1].id


def test_everything_exhausted_falls_back_to_draft():
    depth_limit = 2
    b = TreeBuilder()
    for _ in range(3):
        node = b.add()
        while b.tree.debug_depth_of(node.id) < depth_limit:
            node = b.add(parent=node.id)
        assert b.tree.debug_depth_of(node.id) == depth_limit
    action = select(b.tree, config(drafts=3, depth=depth_limit))
    assert action.kind is Stage.DRAFT
    assert action.target_id is None


def test_debug_prefers_most_recent_eligible_leaf():
    b = TreeBuilder()
    old_leaf = b.add()
    new_leaf = b.add()
    action = select(b.tree, config(drafts=2))
    assert action.kind is Stage.DEBUG
    assert action.target_id == new_leaf.id
    assert new_leaf.created_step > old_leaf.created_step


def test_select_is_deterministic_on_random_trees():
    rng = random.Random(7)
    for _ in range(200):
        tree = random_tree(rng)
        cfg = config(drafts=rng.randint(1, 4), depth=rng.randint(1, 4))
        assert select(tree, cfg) == select(tree, cfg)


def test_never_debugs_beyond_depth_limit():
    rng = random.Random(11)
    for _ in range(300):
        tree = random_tree(rng, p_buggy=0.7)
        cfg = config(drafts=rng.randint(1, 3), depth=rng.randint(1, 3))
        action = select(tree, cfg)
        if action.kind is Stage.DEBUG:
            assert tree.debug_depth_of(action.target_id) < cfg.debug_depth_limit


def test_drafts_first_until_quota():
    rng = random.Random(13)
    for _ in range(300):
        tree = random_tree(rng, max_nodes=10)
        quota = tree.draft_count() + rng.randint(1, 3)  # always above current count
        action = select(tree, config(drafts=quota))
        assert action.kind is Stage.DRAFT


def test_improve_targets_brute_force_best():
    rng = random.Random(17)
    for _ in range(300):
        tree = random_tree(rng, p_buggy=0.2)
        cfg = config(drafts=max(tree.draft_count(), 1), depth=1)
        action = select(tree, cfg)
        if action.kind is Stage.IMPROVE:
            assert action.target_id == brute_force_best(tree).id
