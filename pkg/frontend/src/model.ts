/** Wire types mirroring the session API's JSON documents. */

export type QuestionKind =
	| "classify"
	| "root"
	| "parent"
	| "place"
	| "group"
	| "bounds";

export interface GroupCandidate {
	kind: "mutex" | "or" | "xor";
	parent: string;
	children: string[];
}

export interface Question {
	kind: QuestionKind;
	subject: string | null;
	candidates: unknown[];
}

export interface StepResponse {
	id: string;
	status: "pending" | "completed";
	question: Question | null;
}

export interface SessionProgress {
	columns?: Record<string, string>;
	features?: string[];
	attributes?: string[];
	big_edges?: [string, string][];
	mutex_edges?: [string, string][];
	root?: string;
	parents?: Record<string, string>;
	placement?: Record<string, string>;
	groups?: GroupCandidate[];
}

export interface OverApproximation {
	computed: boolean;
	reason?: string;
	complete?: boolean;
	extra_count?: number;
	extra?: { selected: string[]; values: Record<string, unknown> }[];
}

export interface Snapshot {
	id: string;
	status: "pending" | "completed";
	question: Question | null;
	answered: number;
	progress: SessionProgress;
	transcript: unknown[];
	over_approximation?: OverApproximation;
}

export interface AfmGroup {
	parent: string;
	children: string[];
}

export interface AfmAttribute {
	name: string;
	column: string;
	domain: unknown[];
	null: unknown;
	numeric: boolean;
	place: string | null;
}

export interface AfmDocument {
	format: string;
	mode: "exact" | "diagram-only";
	features: { name: string }[];
	attributes: AfmAttribute[];
	hierarchy: { root: string; edges: [string, string][] };
	mandatory: [string, string][];
	groups: { mutex: AfmGroup[]; xor: AfmGroup[]; or: AfmGroup[] };
	constraints: string[];
	phi: { variables: string[]; rows: unknown[][] } | null;
}

export interface ApiErrorBody {
	stage: string;
	code: string;
	message: string;
}
