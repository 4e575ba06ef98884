import java.util.Arrays;

public class MinMeetingRooms {
    public static int main(String[] args) {
        int[] starts = {0, 5, 15};
        int[] ends = {30, 10, 20};
        Arrays.sort(starts);
        Arrays.sort(ends);
        int rooms = 0;
        int maxRooms = 0;
        int e = 0;
        for (int s = 0; s < starts.length; s++) {
            if (starts[s] < ends[e]) {
                rooms++;
            } else {
                e++;
            }
            maxRooms = Math.max(maxRooms, rooms);
        }
        return maxRooms;
    }
}
