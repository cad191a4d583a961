// A small force simulation for displaying the server's graph documents.
// Server x/y are initial hints only; layout is pure presentation.
const REPULSION = 900;
const SPRING = 0.08;
const REST_LENGTH = 28;
const CENTERING = 0.012;
const DAMPING = 0.85;
export class ForceSim {
    width;
    height;
    bodies = [];
    springs = [];
    constructor(width, height) {
        this.width = width;
        this.height = height;
    }
    // Keep positions of surviving ids so the picture does not jump when a
    // new snapshot arrives.
    load(doc) {
        const previous = new Map(this.bodies.map((b) => [b.id + ":" + b.type, b]));
        this.bodies = doc.nodes.map((n, k) => {
            const old = previous.get(n.id + ":" + n.type);
            const angle = (2 * Math.PI * k) / Math.max(doc.nodes.length, 1);
            return {
                id: n.id,
                type: n.type,
                x: old ? old.x : this.width / 2 + n.x * 90 + 12 * Math.cos(7 * angle),
                y: old ? old.y : this.height / 2 + n.y * 90 + 12 * Math.sin(7 * angle),
                vx: 0,
                vy: 0,
            };
        });
        this.springs = doc.links.map((l) => ({
            source: l.source,
            target: l.target,
            value: l.value,
        }));
    }
    tick() {
        const n = this.bodies.length;
        if (n === 0)
            return;
        for (let i = 0; i < n; i++) {
            const a = this.bodies[i];
            for (let j = i + 1; j < n; j++) {
                const b = this.bodies[j];
                let dx = a.x - b.x;
                let dy = a.y - b.y;
                let d2 = dx * dx + dy * dy;
                if (d2 < 1) {
                    dx = (i - j) * 0.31;
                    dy = 0.17;
                    d2 = dx * dx + dy * dy;
                }
                const f = REPULSION / d2;
                const d = Math.sqrt(d2);
                const fx = (f * dx) / d;
                const fy = (f * dy) / d;
                a.vx += fx;
                a.vy += fy;
                b.vx -= fx;
                b.vy -= fy;
            }
        }
        for (const s of this.springs) {
            const a = this.bodies[s.source];
            const b = this.bodies[s.target];
            if (!a || !b)
                continue;
            const dx = b.x - a.x;
            const dy = b.y - a.y;
            const d = Math.max(Math.sqrt(dx * dx + dy * dy), 0.5);
            const rest = s.value === 2 ? REST_LENGTH * 0.6 : REST_LENGTH;
            const f = SPRING * (d - rest);
            const fx = (f * dx) / d;
            const fy = (f * dy) / d;
            a.vx += fx;
            a.vy += fy;
            b.vx -= fx;
            b.vy -= fy;
        }
        const cx = this.width / 2;
        const cy = this.height / 2;
        for (const body of this.bodies) {
            body.vx += (cx - body.x) * CENTERING;
            body.vy += (cy - body.y) * CENTERING;
            body.vx *= DAMPING;
            body.vy *= DAMPING;
            body.x += body.vx;
            body.y += body.vy;
        }
    }
    // Total speed; handy for settling checks.
    energy() {
        return this.bodies.reduce((sum, b) => sum + Math.abs(b.vx) + Math.abs(b.vy), 0);
    }
}
