/** Pure view-model logic: trees, question context, answer payload shaping. */

import type {
	AfmDocument,
	GroupCandidate,
	Question,
	SessionProgress,
	Snapshot,
} from "./model.js";

export interface TreeNode {
	name: string;
	mandatory: boolean;
	attributes: string[];
	groups: { kind: string; children: string[] }[];
	children: TreeNode[];
}

/** Nest a child->parent map into a tree; ignores nodes not reachable from the root. */
export function buildTree(
	root: string | null | undefined,
	parents: Record<string, string>,
	extras: {
		mandatory?: [string, string][];
		placement?: Record<string, string>;
		groups?: { kind: string; parent: string; children: string[] }[];
	} = {},
): TreeNode | null {
	if (!root) return null;
	const mandatorySet = new Set(
		(extras.mandatory ?? []).map(([c, p]) => JSON.stringify([c, p])),
	);
	const byParent = new Map<string, string[]>();
	for (const [child, parent] of Object.entries(parents)) {
		const got = byParent.get(parent) ?? [];
		got.push(child);
		byParent.set(parent, got);
	}
	const attrsAt = new Map<string, string[]>();
	for (const [attr, host] of Object.entries(extras.placement ?? {})) {
		const got = attrsAt.get(host) ?? [];
		got.push(attr);
		attrsAt.set(host, got);
	}
	const groupsAt = new Map<string, { kind: string; children: string[] }[]>();
	for (const g of extras.groups ?? []) {
		const got = groupsAt.get(g.parent) ?? [];
		got.push({ kind: g.kind, children: [...g.children].sort() });
		groupsAt.set(g.parent, got);
	}
	const make = (name: string, parent: string | null): TreeNode => ({
		name,
		mandatory: parent !== null && mandatorySet.has(JSON.stringify([name, parent])),
		attributes: (attrsAt.get(name) ?? []).sort(),
		groups: groupsAt.get(name) ?? [],
		children: (byParent.get(name) ?? [])
			.sort()
			.map((c) => make(c, name)),
	});
	return make(root, null);
}

export function treeFromModel(doc: AfmDocument): TreeNode | null {
	const parents: Record<string, string> = {};
	for (const [child, parent] of doc.hierarchy.edges) parents[child] = parent;
	const placement: Record<string, string> = {};
	for (const a of doc.attributes) {
		if (a.place) placement[a.name] = a.place;
	}
	const groups = (["mutex", "xor", "or"] as const).flatMap((kind) =>
		doc.groups[kind].map((g) => ({ kind, parent: g.parent, children: g.children })),
	);
	return buildTree(doc.hierarchy.root, parents, {
		mandatory: doc.mandatory,
		placement,
		groups,
	});
}

export function describeQuestion(q: Question): string {
	switch (q.kind) {
		case "classify":
			return `How should column "${q.subject}" be interpreted?`;
		case "root":
			return "Which feature is the root of the hierarchy?";
		case "parent":
			return `Choose the parent of feature "${q.subject}"`;
		case "place":
			return `Where does attribute "${q.subject}" belong?`;
		case "group":
			return "These candidate groups overlap; keep which?";
		case "bounds":
			return `Interesting bounds for attribute "${q.subject}"`;
	}
}

/**
 * The implication edges worth drawing next to a question: for parent
 * questions every candidate IS an implication target of the subject.
 */
export function questionEdges(q: Question, progress: SessionProgress): [string, string][] {
	if (q.kind === "parent" && q.subject) {
		const subject = q.subject;
		return (q.candidates as string[]).map((c) => [subject, c]);
	}
	if (q.kind === "group") {
		const involved = new Set(
			(q.candidates as GroupCandidate[]).flatMap((g) => g.children),
		);
		return (progress.mutex_edges ?? []).filter(
			([a, b]) => involved.has(a) && involved.has(b),
		);
	}
	return [];
}

/**
 * Shape a UI selection into the wire answer. Selections index into the
 * offered candidates, so the client cannot fabricate an option the server
 * never offered; bounds are the one free-form numeric entry, validated
 * against the offered domain values.
 */
export function answerPayload(q: Question, selection: number[] | string): unknown {
	if (q.kind === "group") {
		if (typeof selection === "string") throw new Error("group answers are index lists");
		return selection;
	}
	if (q.kind === "bounds") {
		const values =
			typeof selection === "string"
				? selection.split(",").map((s) => Number.parseInt(s.trim(), 10))
				: selection.map((i) => Number(q.candidates[i]));
		if (values.some((v) => Number.isNaN(v) || v < 0)) {
			throw new Error("bounds must be natural numbers");
		}
		const offered = new Set(q.candidates.map((c) => Number(c)));
		for (const v of values) {
			if (!offered.has(v)) throw new Error(`bound ${v} is not a domain value`);
		}
		return values;
	}
	if (typeof selection === "string") {
		if (!q.candidates.includes(selection)) {
			throw new Error(`"${selection}" was not offered`);
		}
		return selection;
	}
	const choice = q.candidates[selection[0]];
	if (choice === undefined) throw new Error("selection out of range");
	return choice;
}

export function candidateLabels(q: Question): string[] {
	if (q.kind === "group") {
		return (q.candidates as GroupCandidate[]).map(
			(g) => `${g.kind} under ${g.parent}: ${g.children.join(", ")}`,
		);
	}
	return q.candidates.map((c) => String(c));
}

export type Phase = "upload" | "question" | "done";

export function phaseOf(snapshot: Snapshot | null): Phase {
	if (!snapshot) return "upload";
	return snapshot.status === "completed" ? "done" : "question";
}
