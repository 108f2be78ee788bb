// Decision-tree view: fetch an agent's structure from the server, lay it out
// top-down with argument order preserved left to right, draw on a canvas
// with pan and zoom.

export interface TreeNode {
  label: string;
  children: TreeNode[];
}

export interface AgentTree {
  id: string;
  nodeCount: number;
  source: string;
  root: TreeNode;
}

export interface LaidOutNode {
  label: string;
  x: number; // centre, layout units
  y: number; // depth, layout units
}

export interface TreeLayout {
  nodes: LaidOutNode[];
  edges: [number, number][]; // parent index -> child index, argument order
  width: number;
  depth: number;
}

/** Tidy-enough tree layout: leaves get consecutive x slots, internal nodes
 * centre over their children. Deterministic for a given tree. */
export function layoutTree(root: TreeNode): TreeLayout {
  const nodes: LaidOutNode[] = [];
  const edges: [number, number][] = [];
  let nextLeafX = 0;
  let maxDepth = 0;

  function place(node: TreeNode, depth: number): number {
    const index = nodes.length;
    nodes.push({ label: node.label, x: 0, y: depth });
    maxDepth = Math.max(maxDepth, depth);
    if (node.children.length === 0) {
      nodes[index].x = nextLeafX++;
    } else {
      const childIndexes = node.children.map((c) => {
        const ci = place(c, depth + 1);
        edges.push([index, ci]);
        return ci;
      });
      const xs = childIndexes.map((ci) => nodes[ci].x);
      nodes[index].x = (Math.min(...xs) + Math.max(...xs)) / 2;
    }
    return index;
  }

  place(root, 0);
  // edges were appended post-order per parent; restore argument order overall
  edges.sort((a, b) => a[0] - b[0] || a[1] - b[1]);
  return { nodes, edges, width: Math.max(1, nextLeafX), depth: maxDepth + 1 };
}

export interface TreeCtx {
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  font: string;
  textAlign: CanvasTextAlign;
  lineWidth: number;
  clearRect(x: number, y: number, w: number, h: number): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  strokeRect(x: number, y: number, w: number, h: number): void;
  fillText(text: string, x: number, y: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  stroke(): void;
}

export interface ViewTransform {
  panX: number;
  panY: number;
  zoom: number;
}

const NODE_W = 110;
const NODE_H = 30;
const GAP_X = 18;
const GAP_Y = 40;

export function drawTree(
  ctx: TreeCtx,
  layout: TreeLayout,
  view: ViewTransform,
  canvasW: number,
  canvasH: number,
): void {
  ctx.clearRect(0, 0, canvasW, canvasH);
  const px = (n: LaidOutNode) =>
    view.panX + (n.x * (NODE_W + GAP_X) + NODE_W / 2) * view.zoom;
  const py = (n: LaidOutNode) =>
    view.panY + (n.y * (NODE_H + GAP_Y) + NODE_H / 2) * view.zoom;

  ctx.strokeStyle = "#888888";
  ctx.lineWidth = Math.max(1, view.zoom);
  for (const [a, b] of layout.edges) {
    ctx.beginPath();
    ctx.moveTo(px(layout.nodes[a]), py(layout.nodes[a]) + (NODE_H / 2) * view.zoom);
    ctx.lineTo(px(layout.nodes[b]), py(layout.nodes[b]) - (NODE_H / 2) * view.zoom);
    ctx.stroke();
  }
  ctx.font = `${Math.max(8, 12 * view.zoom)}px monospace`;
  ctx.textAlign = "center";
  for (const node of layout.nodes) {
    const w = NODE_W * view.zoom;
    const h = NODE_H * view.zoom;
    ctx.fillStyle = "#f6f2e8";
    ctx.fillRect(px(node) - w / 2, py(node) - h / 2, w, h);
    ctx.strokeStyle = "#444444";
    ctx.strokeRect(px(node) - w / 2, py(node) - h / 2, w, h);
    ctx.fillStyle = "#111111";
    ctx.fillText(node.label, px(node), py(node) + 4 * view.zoom);
  }
}

export async function fetchAgentTree(
  baseUrl: string,
  agentId: string,
): Promise<AgentTree> {
  const res = await fetch(`${baseUrl}/api/agents/${agentId}/tree`);
  if (!res.ok) {
    throw new Error(`unknown agent id ${agentId} (${res.status})`);
  }
  return (await res.json()) as AgentTree;
}

export function countNodes(root: TreeNode): number {
  return 1 + root.children.reduce((acc, c) => acc + countNodes(c), 0);
}
