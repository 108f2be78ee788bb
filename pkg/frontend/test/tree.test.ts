// Tree layout: labels, argument-ordered edges, deterministic geometry.

import { describe, expect, it } from "vitest";

import { TreeNode, countNodes, layoutTree } from "../src/tree.js";

const leaf = (label: string): TreeNode => ({ label, children: [] });

describe("layoutTree", () => {
  it("single node: one box, no edges", () => {
    const layout = layoutTree(leaf("Jump"));
    expect(layout.nodes).toHaveLength(1);
    expect(layout.edges).toHaveLength(0);
    expect(layout.nodes[0].label).toBe("Jump");
  });

  it("three-node sequence: root with two ordered children", () => {
    const layout = layoutTree({
      label: "Seq2",
      children: [leaf("Right"), leaf("Jump")],
    });
    expect(layout.nodes.map((n) => n.label)).toEqual(["Seq2", "Right", "Jump"]);
    expect(layout.edges).toEqual([[0, 1], [0, 2]]);
    // argument order preserved left to right
    expect(layout.nodes[1].x).toBeLessThan(layout.nodes[2].x);
    // parent centred over children
    expect(layout.nodes[0].x).toBe(
      (layout.nodes[1].x + layout.nodes[2].x) / 2,
    );
  });

  it("node count matches a server-style tree", () => {
    const tree: TreeNode = {
      label: "IfElse",
      children: [
        { label: "IsEnemyAt", children: [leaf("1"), leaf("0")] },
        leaf("Jump"),
        { label: "Seq2", children: [leaf("Right"), leaf("Jump")] },
      ],
    };
    const layout = layoutTree(tree);
    expect(countNodes(tree)).toBe(8);
    expect(layout.nodes).toHaveLength(8);
    expect(layout.edges).toHaveLength(7);
    expect(layout.depth).toBe(3);
  });

  it("is deterministic", () => {
    const tree: TreeNode = {
      label: "Seq3",
      children: [leaf("Right"), leaf("Run"), leaf("Jump")],
    };
    expect(layoutTree(tree)).toEqual(layoutTree(tree));
  });
});
